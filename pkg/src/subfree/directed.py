"""Directed broadcast model: the diamond tester, directed C_k, and the
set-disjointness reduction graphs.

In this model a node hears only its in-neighbors and broadcasts one message
per round along all of its out-arcs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from . import kernels
from .attempts import check_engine, check_eps, first_reject
from .cycles import test_directed_ck_impl
from .graph import DiGraph, GraphError, directed_diamond
from .rng import draw, mix64
from .sim import Layout, NodeContext, NodeProgram, SimConfig, Transcript, Verdict, id_bits, run_protocol, weight_bits

DIAMOND = directed_diamond()
GADGETS = ("paper", "repaired")


@dataclass
class GapDisjInstance:
    graph: DiGraph
    nU: int
    X: frozenset[int]
    Y: frozenset[int]
    names: list[str]
    gadget: str = "paper"
    ids: dict[str, int] = field(default_factory=dict)

    def sidecar(self) -> dict:
        return {"nU": self.nU, "X": sorted(self.X), "Y": sorted(self.Y), "gadget": self.gadget,
                "names": self.names}


def gen_gapdisj(nU: int, X: Iterable[int], Y: Iterable[int], gadget: str = "paper") -> GapDisjInstance:
    """Reduction graph for universe ``{1..nU}``.

    ``paper`` is the skeleton as usually drawn: paths A->C1..C5->B and
    B->D1..D5->A, arcs A->i, B->i, i->C3, plus i->A for i in X and i->B for
    i in Y. It contains diamonds even when X and Y are disjoint.
    ``repaired`` replaces A->i and B->i by sinks S_1..S_nU (A->S_j, B->S_j,
    chained into the universe) so that a diamond exists iff X and Y meet.
    """
    if gadget not in GADGETS:
        raise ValueError(f"gadget must be one of {GADGETS}")
    if nU < 2:
        raise ValueError("universe size must be at least 2")
    X, Y = frozenset(X), frozenset(Y)
    for name, S in (("X", X), ("Y", Y)):
        if any(not 1 <= i <= nU for i in S):
            raise ValueError(f"{name} must be a subset of 1..{nU}")
    names = [str(i) for i in range(1, nU + 1)] + ["A", "B"] + [f"C{j}" for j in range(1, 6)] \
        + [f"D{j}" for j in range(1, 6)]
    if gadget == "repaired":
        names += [f"S{j}" for j in range(1, nU + 1)]
    ids = {nm: v for v, nm in enumerate(names)}
    u = lambda i: ids[str(i)]
    arcs = []
    cpath = ["A"] + [f"C{j}" for j in range(1, 6)] + ["B"]
    dpath = ["B"] + [f"D{j}" for j in range(1, 6)] + ["A"]
    for path in (cpath, dpath):
        arcs += [(ids[a], ids[b]) for a, b in zip(path, path[1:])]
    for i in range(1, nU + 1):
        arcs.append((u(i), ids["C3"]))
        if gadget == "paper":
            arcs += [(ids["A"], u(i)), (ids["B"], u(i))]
    if gadget == "repaired":
        for j in range(1, nU + 1):
            arcs += [(ids["A"], ids[f"S{j}"]), (ids["B"], ids[f"S{j}"])]
            arcs.append((ids[f"S{j}"], ids[f"S{j + 1}"] if j < nU else u(1)))
        arcs += [(u(i), u(i + 1)) for i in range(1, nU)]
    arcs += [(u(i), ids["A"]) for i in sorted(X)]
    arcs += [(u(i), ids["B"]) for i in sorted(Y)]
    return GapDisjInstance(DiGraph(len(names), arcs), nU, X, Y, names, gadget, ids)


def random_gapdisj(nU: int, overlap: int, seed: int, gadget: str = "paper",
                   density: float = 0.3) -> GapDisjInstance:
    """Random X, Y with ``|X ∩ Y| = overlap`` exactly."""
    if not 0 <= overlap <= nU:
        raise ValueError("overlap must lie in [0, nU]")
    r = mix64(seed ^ 0x6A9D15)
    order = sorted(range(1, nU + 1), key=lambda i: draw(r, i))
    common = set(order[:overlap])
    X, Y = set(common), set(common)
    for idx, i in enumerate(order[overlap:]):
        side = draw(r, 1000 + idx) % 1000 / 1000
        if side < density:
            X.add(i)
        elif side < 2 * density:
            Y.add(i)
    return gen_gapdisj(nU, X, Y, gadget)


def is_strongly_connected(g: DiGraph) -> bool:
    if g.n == 0:
        return True
    for adj in (g.out_adj, g.in_adj):
        seen, stack = {0}, [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != g.n:
            return False
    return True


# ------------------------------------------------------------ diamond tester

class DiamondNode(NodeProgram):
    """Round 1: color-0 nodes broadcast (weight, id). Round 2: color-1/2
    nodes broadcast their lightest color-0 in-neighbor. A color-3 node that
    hears the same choice from a color-1 and a color-2 in-neighbor rejects."""

    def __init__(self, ctx: NodeContext):
        super().__init__(ctx)
        self.color = ctx.random.below(0, 4)
        self.w = ctx.random.below(1, ctx.n ** 4)
        L = ctx.id_bits
        self.sel_msg = Layout("sel", wgt=weight_bits(ctx.n), x=L)
        self.pick_msg = Layout("pick", wgt=weight_bits(ctx.n), x=L, color=2)
        self.best: tuple[int, int] | None = None

    def compose(self, rnd: int):
        if rnd == 1 and self.color == 0:
            return self.sel_msg.pack(wgt=self.w, x=self.ctx.id)
        if rnd == 2 and self.color in (1, 2) and self.best is not None:
            return self.pick_msg.pack(wgt=self.best[0], x=self.best[1], color=self.color)
        return None

    def receive(self, rnd: int, inbox) -> None:
        if rnd == 1:
            if self.color in (1, 2):
                cands = [(m.wgt, m.x) for m in inbox.values()]
                self.best = min(cands) if cands else None
            return
        if self.color == 3:
            ones: dict[int, int] = {}
            twos: dict[int, int] = {}
            for u, m in sorted(inbox.items()):
                if m.color in (1, 2):
                    (ones if m.color == 1 else twos).setdefault(m.x, u)
            common = sorted(set(ones) & set(twos))
            if common:
                x = common[0]
                self.reject([x, ones[x], twos[x], self.ctx.id])
        self.finish()


def diamond_attempt_count(eps: float) -> int:
    return math.ceil(20 * 4 ** 4 / check_eps(eps))


def simulate_diamond_attempt(g: DiGraph, seed: int, attempt: int) -> Transcript:
    return run_protocol(g, DiamondNode, SimConfig(global_seed=seed, model="directed"), attempt)


def test_directed_diamond(g: DiGraph, eps: float, seed: int = 0, engine: str = "fast",
                          attempts: int | None = None) -> Verdict:
    if not g.directed:
        raise GraphError("the diamond tester needs a DiGraph")
    check_engine(engine)
    total = diamond_attempt_count(eps) if attempts is None else attempts
    width = weight_bits(g.n) + id_bits(g.n) + 2
    ip, ix = g.in_csr
    res = first_reject(total, 2, width,
                       lambda s, c: kernels.diamond_attempts(ip, ix, g.n, seed, s, c),
                       lambda a: simulate_diamond_attempt(g, seed, a), engine)
    info = {"engine": engine, "backend": kernels.BACKEND, "first_reject_attempt": res.attempt}
    if res.attempt < 0:
        return Verdict(False, rounds=res.rounds, max_bits=res.max_bits, attempts=res.attempts_run, info=info)
    t = res.transcript
    return Verdict(True, witness=t.node_witnesses[min(t.node_witnesses)], rounds=res.rounds,
                   max_bits=res.max_bits, attempts=res.attempts_run, info=info)


def test_directed_ck(g: DiGraph, k: int, eps: float, seed: int = 0, engine: str = "fast",
                     attempts: int | None = None) -> Verdict:
    """C_k tester with BFS messages travelling along arcs."""
    return test_directed_ck_impl(g, k, eps, seed, engine, attempts)
