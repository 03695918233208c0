"""The class of patterns with an edge meeting every cycle.

Every member is built from an anchor edge ``(0, 1)`` by adding cycles through
0 or 1 (vertex-disjoint apart from 0 and 1), then trees hanging from existing
labels, then extra edges from 0 (``e0``) and from 1 (``e1``). ``decompose``
finds such a recipe for a given member and ``recompose`` replays it.

The tester (``test_h_freeness``) picks a random edge ``(u0, u1)`` by minimum
weight, floods it, and then checks every recipe component with tagged
CheckTree and ColorBFS runs; ``u0`` rejects when ``u1`` confirms.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .attempts import check_engine, check_eps, first_reject
from .cycles import BFSState, bfs_layout
from .graph import MAX_PATTERN_SIZE, Graph, GraphError, Pattern, SizeLimitError, connected_components, diameter
from .oracle import is_in_h_class
from .sim import (Layout, NodeContext, NodeProgram, SimConfig, Transcript, Verdict, id_bits,
                  run_protocol, weight_bits)
from .trees import TreeState, tree_layout


class RecipeError(GraphError):
    def __init__(self, stage: int, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


@dataclass
class Recipe:
    """Labels are ``0..k-1``; ``origin[x]`` is the source-pattern vertex of label ``x``."""

    cycles: list[tuple[list[int], int]] = field(default_factory=list)
    trees: dict[int, dict[int, int]] = field(default_factory=dict)
    e0: list[int] = field(default_factory=list)
    e1: list[int] = field(default_factory=list)
    anchor: tuple[int, int] = (0, 1)
    origin: list[int] | None = None

    def to_json(self) -> str:
        return json.dumps({
            "anchor": list(self.anchor),
            "cycles": [{"labels": list(c), "owner": o} for c, o in self.cycles],
            "trees": {str(x): {str(c): p for c, p in sorted(t.items())} for x, t in sorted(self.trees.items())},
            "e0": sorted(self.e0), "e1": sorted(self.e1),
            "origin": self.origin,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Recipe":
        d = json.loads(text)
        return cls(cycles=[(list(c["labels"]), int(c["owner"])) for c in d.get("cycles", [])],
                   trees={int(x): {int(c): int(p) for c, p in t.items()} for x, t in d.get("trees", {}).items()},
                   e0=[int(w) for w in d.get("e0", [])], e1=[int(w) for w in d.get("e1", [])],
                   anchor=tuple(d.get("anchor", (0, 1))), origin=d.get("origin"))


def is_in_H(h: Pattern | Graph) -> tuple[int, int] | None:
    """An edge whose two endpoints meet every cycle, or ``None``."""
    return is_in_h_class(h)


# ---------------------------------------------------------------- decompose

def _orient(cycle: list[int], owner: int) -> list[int]:
    i = cycle.index(owner)
    rot = cycle[i:] + cycle[:i]
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return rot


def _base_cycles(adj: dict[int, set[int]]) -> list[tuple[list[int], int]] | None:
    """Cycles of a graph in base form (anchor plus attached paths), else ``None``."""
    if 1 not in adj[0]:
        return None
    rest = {v for v in adj if v not in (0, 1)}
    seen: set[int] = set()
    cycles = []
    for s in sorted(rest):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y in rest and y not in seen:
                    seen.add(y)
                    stack.append(y)
        inner = {x: [y for y in adj[x] if y in rest] for x in comp}
        if any(len(v) > 2 for v in inner.values()):
            return None
        ends = [x for x in comp if len(inner[x]) <= 1]
        if len(comp) > 1 and len(ends) != 2:
            return None
        if len(comp) == 1:
            ends = [comp[0], comp[0]]
        path = [min(ends)]
        while len(path) < len(comp):
            path.append(next(y for y in inner[path[-1]] if y not in path))
        if len(path) != len(comp):
            return None
        att = {x: sorted(adj[x] & {0, 1}) for x in comp}
        a, b = path[0], path[-1]
        if any(att[x] for x in path[1:-1]):
            return None
        if len(comp) == 1:
            if att[a] != [0, 1]:
                return None
            ends_att = (0, 1)
        else:
            if len(att[a]) != 1 or len(att[b]) != 1:
                return None
            ends_att = (att[a][0], att[b][0])
        if ends_att[0] == ends_att[1]:
            cyc, owner = [ends_att[0]] + path, ends_att[0]
        else:
            if ends_att[0] == 1:
                path = path[::-1]
            cyc, owner = [0] + path + [1], 0
        cycles.append((_orient(cyc, owner), owner))
    return cycles


def _is_bridge(adj: dict[int, set[int]], u: int, v: int) -> bool:
    seen, stack = {u}, [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if (x, y) in ((u, v), (v, u)) or y in seen:
                continue
            if y == v:
                return False
            seen.add(y)
            stack.append(y)
    return True


def decompose(h: Pattern | Graph, anchor: tuple[int, int] | None = None) -> Recipe:
    """Recipe for ``h`` with ``anchor`` mapped to labels ``(0, 1)``."""
    g = h.graph if isinstance(h, Pattern) else h
    if g.directed:
        raise GraphError("class membership is defined for undirected patterns")
    if len(connected_components(g)) != 1:
        raise GraphError("pattern must be connected")
    if anchor is None:
        anchor = is_in_H(g)
        if anchor is None:
            raise GraphError("pattern is not a member: no edge meets every cycle")
    u, v = anchor
    if not g.has_edge(u, v):
        raise GraphError(f"anchor {anchor} is not an edge")
    order = [u, v] + [x for x in range(g.n) if x not in (u, v)]
    new = {x: i for i, x in enumerate(order)}
    adj: dict[int, set[int]] = {i: set() for i in range(g.n)}
    for a, b in g.edges:
        adj[new[a]].add(new[b])
        adj[new[b]].add(new[a])
    parent: dict[int, int] = {}
    e0: list[int] = []
    e1: list[int] = []
    while True:
        cycles = _base_cycles(adj)
        if cycles is not None:
            break
        leaves = sorted(x for x in adj if x not in (0, 1) and len(adj[x]) == 1)
        if leaves:
            w = leaves[0]
            p = next(iter(adj[w]))
            parent[w] = p
            adj[p].discard(w)
            del adj[w]
            continue
        for hub, bucket in ((0, e0), (1, e1)):
            cands = sorted(w for w in adj[hub] if w not in (0, 1) and not _is_bridge(adj, hub, w))
            if cands:
                w = cands[0]
                adj[hub].discard(w)
                adj[w].discard(hub)
                bucket.append(w)
                break
        else:
            raise GraphError(f"anchor {anchor} does not meet every cycle")
    trees: dict[int, dict[int, int]] = {}
    for w, p in parent.items():
        r = p
        while r in parent:
            r = parent[r]
        trees.setdefault(r, {})[w] = p
    return Recipe(cycles=cycles, trees=trees, e0=sorted(e0), e1=sorted(e1), origin=order)


# ---------------------------------------------------------------- recompose

def recompose(r: Recipe) -> Pattern:
    """Build the pattern by running the four stages in order."""
    if tuple(r.anchor) != (0, 1):
        raise RecipeError(1, f"anchor must be (0, 1), got {r.anchor}")
    edges = {(0, 1)}
    labels = {0, 1}
    for labels_c, owner in r.cycles:
        if len(labels_c) < 3 or len(set(labels_c)) != len(labels_c):
            raise RecipeError(2, f"cycle {labels_c} needs at least 3 distinct labels")
        if owner not in (0, 1) or owner not in labels_c:
            raise RecipeError(2, f"cycle {labels_c} must pass through its owner {owner}")
        shared = (set(labels_c) & labels) - {0, 1}
        if shared:
            raise RecipeError(2, f"cycle {labels_c} reuses labels {sorted(shared)}")
        for a, b in zip(labels_c, labels_c[1:] + labels_c[:1]):
            e = (min(a, b), max(a, b))
            if e in edges and e != (0, 1):
                raise RecipeError(2, f"edge {e} added twice")
            edges.add(e)
        labels.update(labels_c)
    base = set(labels)
    for x, tree in sorted(r.trees.items()):
        if x not in base:
            raise RecipeError(3, f"tree root {x} is not an existing label")
        fresh = set(tree)
        if fresh & labels:
            raise RecipeError(3, f"tree at {x} reuses labels {sorted(fresh & labels)}")
        for c, p in tree.items():
            seen = {c}
            while p != x:
                if p not in tree or p in seen:
                    raise RecipeError(3, f"label {c} of tree {x} does not reach the root")
                seen.add(p)
                p = tree[p]
        for c, p in tree.items():
            edges.add((min(c, p), max(c, p)))
        labels |= fresh
    for hub, ws in ((0, r.e0), (1, r.e1)):
        for w in ws:
            e = (min(hub, w), max(hub, w))
            if w not in labels or w == hub:
                raise RecipeError(4, f"extra edge ({hub}, {w}) uses an unknown label")
            if e in edges:
                raise RecipeError(4, f"extra edge {e} already present")
            edges.add(e)
    if labels != set(range(len(labels))):
        raise RecipeError(4, f"labels {sorted(labels)} are not 0..{len(labels) - 1}")
    return Pattern(Graph(len(labels), edges))


def random_recipe(max_k: int, rng: random.Random) -> Recipe:
    """A random valid recipe on at most ``max_k`` labels."""
    if max_k < 2:
        raise ValueError("a recipe needs at least the two anchor labels")
    nxt = 2
    cycles: list[tuple[list[int], int]] = []
    for _ in range(rng.randint(0, 2)):
        owner = rng.randint(0, 1)
        through_both = rng.random() < 0.3
        need = 1 if through_both else 2
        room = max_k - nxt
        if room < need:
            break
        fresh = list(range(nxt, nxt + rng.randint(need, room)))
        nxt += len(fresh)
        cycles.append(([owner] + fresh + ([1 - owner] if through_both else []), owner))
    trees: dict[int, dict[int, int]] = {}
    core = nxt
    for _ in range(rng.randint(0, max_k - nxt)):
        root = rng.randrange(core)
        if nxt >= max_k or root in trees:
            continue
        tree: dict[int, int] = {}
        for c in range(nxt, nxt + rng.randint(1, max_k - nxt)):
            tree[c] = rng.choice([root] + list(tree))
        trees[root] = tree
        nxt += len(tree)
    edges = recompose(Recipe(cycles, trees)).graph
    e0 = sorted(w for w in range(2, nxt) if not edges.has_edge(0, w) and rng.random() < 0.3)
    e1 = sorted(w for w in range(2, nxt) if not edges.has_edge(1, w) and rng.random() < 0.3)
    return Recipe(cycles, trees, e0, e1)


@dataclass
class HMember:
    pattern: Pattern
    anchor: tuple[int, int]
    recipe: Recipe

    @classmethod
    def of(cls, h: Pattern | Graph, anchor: tuple[int, int] | None = None) -> "HMember":
        p = h if isinstance(h, Pattern) else Pattern(h)
        anchor = anchor or is_in_H(p)
        if anchor is None:
            raise GraphError(f"{p.name} is not in the class: no edge meets every cycle")
        return cls(p, tuple(anchor), decompose(p, anchor))


# --------------------------------------------------------------- the tester

@dataclass
class HPlan:
    """Array form of a recipe, consumed by the attempt kernels."""

    k: int
    diam: int
    e0_mask: int
    e1_mask: int
    tree_root: np.ndarray
    tree_depth: np.ndarray
    tree_children: np.ndarray
    tree_members: np.ndarray
    cyc_len: np.ndarray
    cyc_owner: np.ndarray
    cyc_pos: np.ndarray
    cycles: list[list[int]]
    tree_maps: list[dict[int, int]]

    @property
    def rounds_per_attempt(self) -> int:
        return 1 + self.diam + int(self.tree_depth.sum()) + int(self.cyc_len.sum()) + 1


def build_plan(r: Recipe) -> HPlan:
    h = recompose(r).graph
    k = h.n
    roots = sorted(r.trees)
    depth, children, members = [], np.zeros((len(roots), k), dtype=np.int64), []
    for t, x in enumerate(roots):
        tree = r.trees[x]
        d = {x: 0}
        for c in tree:
            chain, p = [c], tree[c]
            while p not in d:
                chain.append(p)
                p = tree[p]
            for y in reversed(chain):
                d[y] = d[tree[y]] + 1
        depth.append(max(d.values()))
        for c, p in tree.items():
            children[t, p] |= 1 << c
        members.append(sum(1 << y for y in d))
    pos = np.full((len(r.cycles), k), -1, dtype=np.int64)
    for i, (labels_c, _) in enumerate(r.cycles):
        for j, x in enumerate(labels_c):
            pos[i, x] = j
    return HPlan(k=k, diam=diameter(h),
                 e0_mask=sum(1 << w for w in r.e0), e1_mask=sum(1 << w for w in r.e1),
                 tree_root=np.array(roots, dtype=np.int64),
                 tree_depth=np.array(depth, dtype=np.int64),
                 tree_children=children, tree_members=np.array(members, dtype=np.int64),
                 cyc_len=np.array([len(c) for c, _ in r.cycles], dtype=np.int64),
                 cyc_owner=np.array([o for _, o in r.cycles], dtype=np.int64),
                 cyc_pos=pos, cycles=[list(c) for c, _ in r.cycles],
                 tree_maps=[dict(r.trees[x]) for x in roots])


def _schedule(plan: HPlan) -> list[tuple[str, int, int]]:
    sched = [("color", 0, 0)]
    sched += [("flood", 0, i) for i in range(plan.diam)]
    for t, d in enumerate(plan.tree_depth.tolist()):
        sched += [("tree", t, i) for i in range(d)]
    for c, ln in enumerate(plan.cyc_len.tolist()):
        sched += [("cycle", c, i) for i in range(ln)]
    sched.append(("ok", 0, 0))
    return sched


class CheckHNode(NodeProgram):
    def __init__(self, ctx: NodeContext, plan: HPlan, schedule):
        super().__init__(ctx)
        n, L = ctx.n, ctx.id_bits
        self.plan, self.schedule = plan, schedule
        self.color = ctx.random.below(0, plan.k)
        self.color_msg = Layout("color", color=max(1, math.ceil(math.log2(plan.k))))
        self.flood_msg = Layout("flood", wgt=weight_bits(n), u0=L, u1=L)
        self.tree_msg = tree_layout(plan.k, L)
        self.bfs_msg = bfs_layout(n, tagged=True)
        self.ok_msg = Layout("ok", ok=1)
        self.know: tuple[int, int, int] | None = None
        self.aborted = False
        self.tree_states: list[TreeState] = []
        self.bfs_states: list[BFSState] = []
        self.cur = None

    # ---- helpers
    def _all(self, msg):
        return {v: msg for v in self.ctx.neighbors}

    @property
    def tag(self):
        return self.know[1] if self.know else None

    def _start_phase(self, kind: str, idx: int) -> None:
        p = self.plan
        active = not self.aborted
        if kind == "tree":
            member = bool(int(p.tree_members[idx]) >> self.color & 1)
            self.cur = TreeState(self.color, int(p.tree_children[idx, self.color]), member, active, self.tag)
            self.tree_states.append(self.cur)
        else:
            pos = int(p.cyc_pos[idx, self.color])
            origin = pos == 0 and active
            self.cur = BFSState(self.ctx.id, int(p.cyc_len[idx]), pos, active,
                                self.know[0] if origin else None, self.ctx.id if origin else None, self.tag)
            self.bfs_states.append(self.cur)

    def _end_phase(self, kind: str, idx: int) -> None:
        p = self.plan
        if kind == "flood":
            self._flood_aborts()
        elif kind == "tree":
            if self.color == p.tree_root[idx] and not self.cur.closed:
                self.aborted = True
        elif kind == "cycle":
            if self.color == p.cyc_owner[idx] and not self.cur.closed:
                self.aborted = True

    def _flood_aborts(self) -> None:
        me, k = self.ctx.id, self.know
        nb = self.ctx.neighbor_set
        if k is None or (self.color == 0 and k[1] != me) or (self.color == 1 and k[2] != me):
            self.aborted = True
        elif self.plan.e0_mask >> self.color & 1 and k[1] not in nb:
            self.aborted = True
        elif self.plan.e1_mask >> self.color & 1 and k[2] not in nb:
            self.aborted = True

    # ---- protocol
    def wake_round(self, rnd: int) -> int:
        return rnd

    def compose(self, rnd: int):
        kind, idx, i = self.schedule[rnd - 1]
        if kind == "color":
            return self._all(self.color_msg.pack(color=self.color))
        if kind == "flood":
            if self.know is None:
                return None
            w, a, b = self.know
            return self._all(self.flood_msg.pack(wgt=w, u0=a, u1=b))
        if i == 0 and kind in ("tree", "cycle"):
            self._start_phase(kind, idx)
        if kind == "tree":
            out = self.cur.outgoing()
            if out is None:
                return None
            return self._all(self.tree_msg.pack(color=out[0], closed=out[1], tag=self.tag))
        if kind == "cycle":
            out = self.cur.outgoing(i)
            if out is None:
                return None
            return self._all(self.bfs_msg.pack(wgt=out[0], root=out[1], tag=self.tag))
        # ok round: an intact u1 confirms to its u0
        if not self.aborted and self.color == 1 and self.know[1] in self.ctx.neighbor_set:
            return {self.know[1]: self.ok_msg.pack(ok=1)}
        return None

    def receive(self, rnd: int, inbox) -> None:
        kind, idx, i = self.schedule[rnd - 1]
        last = rnd == len(self.schedule) or self.schedule[rnd][:2] != (kind, idx)
        if kind == "color":
            if self.color == 0:
                n4 = self.ctx.n ** 4
                best = None
                for j, u in enumerate(self.ctx.neighbors):
                    if u in inbox and inbox[u].color == 1:
                        cand = (self.ctx.random.below(1 + j, n4), u)
                        if best is None or cand < best:
                            best = cand
                if best is not None:
                    self.know = (best[0], self.ctx.id, best[1])
        elif kind == "flood":
            for m in inbox.values():
                cand = (m.wgt, m.u0, m.u1)
                if self.know is None or cand < self.know:
                    self.know = cand
        elif kind == "tree":
            self.cur.incoming([(u, m.color, m.closed, m.tag) for u, m in inbox.items()])
        elif kind == "cycle":
            self.cur.incoming(i, [(u, m.wgt, m.root, m.tag) for u, m in inbox.items()])
        else:
            if (not self.aborted and self.color == 0 and self.know is not None
                    and self.know[2] in inbox):
                self.reject()
            self.finish()
            return
        if last:
            self._end_phase(kind, idx)

    def export(self) -> dict:
        return {"color": self.color, "know": self.know, "aborted": self.aborted,
                "trees": [dict(s.heard) for s in self.tree_states],
                "cycles": [s.export() for s in self.bfs_states]}


def simulate_checkh_attempt(g: Graph, plan: HPlan, seed: int, attempt: int) -> Transcript:
    sched = _schedule(plan)
    return run_protocol(g, lambda ctx: CheckHNode(ctx, plan, sched), SimConfig(global_seed=seed), attempt)


def trace_checkh(states, plan: HPlan, u0: int) -> list[int]:
    """Label-to-vertex map (recipe labels) of the copy confirmed at ``u0``."""
    phi = [-1] * plan.k
    phi[0] = u0
    phi[1] = states[u0]["know"][2]
    for i, labels_c in enumerate(plan.cycles):
        owner = labels_c[0]
        start = phi[owner]
        cs = [s["cycles"][i] for s in states]
        x = cs[start]["closer"]
        for lab in reversed(labels_c[1:]):
            phi[lab] = x
            x = cs[x]["parent"]
    for t, tree in enumerate(plan.tree_maps):
        x = int(plan.tree_root[t])
        stack = [(x, phi[x])]
        while stack:
            lab, v = stack.pop()
            for c in (c for c, p in tree.items() if p == lab):
                phi[c] = states[v]["trees"][t][c]
                stack.append((c, phi[c]))
    return phi


def checkh_attempt_count(k: int, eps: float) -> int:
    return math.ceil(20 * k ** k / check_eps(eps))


def test_h_freeness(g: Graph, member: HMember, eps: float, seed: int = 0, engine: str = "fast",
                    attempts: int | None = None) -> Verdict:
    """Reject iff some attempt confirms a copy of the member pattern."""
    if g.directed:
        raise GraphError("the class tester runs on undirected graphs")
    k = member.pattern.k
    if k > MAX_PATTERN_SIZE:
        raise SizeLimitError(f"pattern has {k} vertices; at most {MAX_PATTERN_SIZE} supported")
    check_engine(engine)
    total = checkh_attempt_count(k, eps) if attempts is None else attempts
    plan = build_plan(member.recipe)
    L = id_bits(g.n)
    width = max(weight_bits(g.n) + 2 * L, tree_layout(k, L).bits)
    ip, ix = g.csr
    res = first_reject(total, plan.rounds_per_attempt, width,
                       lambda s, c: kernels.checkh_attempts(ip, ix, g.n, plan, seed, s, c),
                       lambda a: simulate_checkh_attempt(g, plan, seed, a), engine)
    info = {"engine": engine, "backend": kernels.BACKEND, "first_reject_attempt": res.attempt,
            "rounds_per_attempt": plan.rounds_per_attempt}
    if res.attempt < 0:
        return Verdict(False, rounds=res.rounds, max_bits=res.max_bits, attempts=res.attempts_run, info=info)
    st = res.transcript.state
    u0 = next(v for v in res.transcript.node_witnesses)
    phi = trace_checkh(st, plan, u0)
    origin = member.recipe.origin or list(range(k))
    witness = [-1] * k
    for lab, v in enumerate(phi):
        witness[origin[lab]] = v
    return Verdict(True, witness=witness, rounds=res.rounds, max_bits=res.max_bits,
                   attempts=res.attempts_run, info=info)
