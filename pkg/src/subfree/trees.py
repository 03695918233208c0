"""Exact T-freeness by color coding and bottom-up closing of subtrees.

A node colored ``x`` waits for a closed neighbor of every child label of
``x``; once it has heard them all it is closed for good. After ``depth``
rounds a closed node colored 0 roots a properly colored copy of T.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .attempts import check_engine, first_reject
from .graph import (DiGraph, Graph, GraphError, Pattern, connected_components,
                    directed_tree_from_parents, tree_from_parents)
from .sim import Layout, NodeContext, NodeProgram, SimConfig, Transcript, Verdict, run_protocol


class TreePattern:
    """A tree on labels ``0..k-1`` rooted at 0, stored as a parent array."""

    def __init__(self, parents: Sequence[int], directed: bool = False):
        k = len(parents) + 1
        for i, p in enumerate(parents, start=1):
            if not 0 <= p < k or p == i:
                raise GraphError(f"bad parent {p} for label {i}")
        self.parents = tuple(int(p) for p in parents)
        self.k = k
        self.directed = directed
        self.children: list[list[int]] = [[] for _ in range(k)]
        for i, p in enumerate(self.parents, start=1):
            self.children[p].append(i)
        g = self.graph.underlying() if directed else self.graph
        if g.m != k - 1 or len(connected_components(g)) != 1:
            raise GraphError("parent array does not describe a tree")
        self.height = [0] * k
        for x in self._postorder():
            self.height[x] = max((self.height[c] + 1 for c in self.children[x]), default=0)
        self.depth = self.height[0]

    @property
    def graph(self) -> Graph | DiGraph:
        if self.directed:
            return directed_tree_from_parents(self.parents)
        return tree_from_parents(self.parents)

    @property
    def pattern(self) -> Pattern:
        return Pattern(self.graph, name=self.spec())

    def _postorder(self) -> list[int]:
        order, stack = [], [0]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(self.children[x])
        return order[::-1]

    @property
    def child_mask(self) -> np.ndarray:
        return np.array([sum(1 << c for c in ch) for ch in self.children], dtype=np.int64)

    def spec(self) -> str:
        return ("DT:" if self.directed else "T:") + ",".join(map(str, self.parents))

    @classmethod
    def from_pattern(cls, p: Pattern | Graph | DiGraph, root: int = 0) -> "TreePattern":
        """Relabel a tree pattern in BFS order from ``root``. Directed
        patterns must have every arc pointing towards the root."""
        g = p.graph if isinstance(p, Pattern) else p
        directed = g.directed
        base = g.underlying() if directed else g
        if base.m != base.n - 1 or len(connected_components(base)) != 1:
            raise GraphError("pattern is not a tree")
        order, par = [root], {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in base.adj[x]:
                if y not in par:
                    par[y] = x
                    order.append(y)
                    queue.append(y)
        label = {x: i for i, x in enumerate(order)}
        if directed:
            for u, v in g.edges:
                if par.get(u) != v:
                    raise GraphError("directed tree arcs must point from child to parent")
        return cls([label[par[x]] for x in order[1:]], directed=directed)

    def __repr__(self) -> str:
        return f"TreePattern({self.spec()})"


def all_trees(max_k: int) -> list[TreePattern]:
    """One TreePattern per unlabeled tree on 2..max_k vertices."""
    from .oracle import enumerate_connected
    out = []
    for k in range(2, max_k + 1):
        for p in enumerate_connected(k):
            if p.graph.m == k - 1:
                out.append(TreePattern.from_pattern(p))
    return out


def tree_layout(k: int, tagged_bits: int = 0) -> Layout:
    cbits = max(1, math.ceil(math.log2(k)))
    if tagged_bits:
        return Layout("tree", color=cbits, closed=1, tag=tagged_bits)
    return Layout("tree", color=cbits, closed=1)


class TreeState:
    """One node's share of a CheckTree run."""

    def __init__(self, color: int, missing: int, member: bool = True, active: bool = True,
                 tag: int | None = None):
        self.color = color
        self.missing = missing if member else 0
        self.member, self.active, self.tag = member, active, tag
        self.closed = member and self.missing == 0
        self.heard: dict[int, int] = {}
        self.history = [self.closed]

    def outgoing(self):
        if self.member and self.active:
            return self.color, int(self.closed)
        return None

    def incoming(self, msgs: Iterable[tuple[int, int, int, int | None]]) -> None:
        """``msgs`` holds ``(sender, color, closed, tag)``."""
        if self.member and self.active:
            for sender, c, closed, tag in sorted(msgs):
                if self.tag is not None and tag != self.tag:
                    continue
                if closed and self.missing >> c & 1:
                    self.missing &= ~(1 << c)
                    self.heard[c] = sender
            if self.missing == 0:
                self.closed = True
        self.history.append(self.closed)


class TreeNode(NodeProgram):
    def __init__(self, ctx: NodeContext, t: TreePattern, color: int | None = None):
        super().__init__(ctx)
        if color is None:
            color = ctx.random.below(0, t.k)
        self.t = t
        self.layout = tree_layout(t.k)
        self.state = TreeState(color, int(t.child_mask[color]))
        self.directed = t.directed

    def compose(self, rnd: int):
        c, closed = self.state.outgoing()
        msg = self.layout.pack(color=c, closed=closed)
        return msg if self.directed else {v: msg for v in self.ctx.neighbors}

    def receive(self, rnd: int, inbox) -> None:
        self.state.incoming([(u, m.color, m.closed, None) for u, m in inbox.items()])
        if rnd >= self.t.depth:
            if self.state.closed and self.state.color == 0:
                self.reject()
            self.finish()

    def export(self) -> dict:
        return {"color": self.state.color, "closed": self.state.closed,
                "heard": dict(self.state.heard), "history": list(self.state.history)}


def trace_tree(states, root_node: int, t: TreePattern) -> tuple[int, ...]:
    """Label-to-vertex map of the copy certified at ``root_node``."""
    phi = [-1] * t.k
    stack = [(0, root_node)]
    while stack:
        x, v = stack.pop()
        phi[x] = v
        for c in t.children[x]:
            stack.append((c, states[v]["heard"][c]))
    return tuple(phi)


def _check_model(g, t: TreePattern) -> SimConfig:
    if g.directed != t.directed:
        raise GraphError("tree pattern and host must both be directed or both undirected")
    return SimConfig(model="directed" if g.directed else "undirected")


def run_check_tree(g: Graph | DiGraph, t: TreePattern, colors: Sequence[int],
                   cfg: SimConfig | None = None) -> Transcript:
    if len(colors) != g.n:
        raise ValueError("one color per vertex required")
    if any(not 0 <= c < t.k for c in colors):
        raise ValueError(f"colors must lie in [0, {t.k})")
    if t.k < 2:
        raise GraphError("tree pattern needs at least one edge")
    cfg = cfg or _check_model(g, t)
    return run_protocol(g, lambda ctx: TreeNode(ctx, t, colors[ctx.id]), cfg)


def check_tree(g: Graph | DiGraph, t: TreePattern, colors: Sequence[int]) -> set[int]:
    """Vertices colored 0 that are closed after ``depth`` rounds."""
    tr = run_check_tree(g, t, colors)
    return {v for v, s in enumerate(tr.state) if s["closed"] and s["color"] == 0}


def tree_repetitions(k: int) -> int:
    return 10 * k ** k


def simulate_tree_attempt(g: Graph | DiGraph, t: TreePattern, seed: int, attempt: int) -> Transcript:
    cfg = SimConfig(global_seed=seed, model="directed" if g.directed else "undirected")
    return run_protocol(g, lambda ctx: TreeNode(ctx, t), cfg, attempt)


def test_t_freeness(g: Graph | DiGraph, t: TreePattern, seed: int = 0, engine: str = "fast",
                    repetitions: int | None = None) -> Verdict:
    """Reject iff some repetition closes a node colored 0."""
    _check_model(g, t)
    check_engine(engine)
    if t.k < 2:
        raise GraphError("tree pattern needs at least one edge")
    total = tree_repetitions(t.k) if repetitions is None else repetitions
    width = tree_layout(t.k).bits
    ip, ix = g.in_csr if g.directed else g.csr
    cm = t.child_mask
    res = first_reject(total, t.depth, width,
                       lambda s, c: kernels.tree_attempts(ip, ix, g.n, t.k, cm, t.depth, seed, s, c),
                       lambda a: simulate_tree_attempt(g, t, seed, a), engine)
    info = {"engine": engine, "backend": kernels.BACKEND, "first_reject_attempt": res.attempt}
    if res.attempt < 0:
        return Verdict(False, rounds=res.rounds, max_bits=res.max_bits, attempts=res.attempts_run, info=info)
    st = res.transcript.state
    root = next(v for v, s in enumerate(st) if s["closed"] and s["color"] == 0)
    return Verdict(True, witness=list(trace_tree(st, root, t)), rounds=res.rounds,
                   max_bits=res.max_bits, attempts=res.attempts_run, info=info)
