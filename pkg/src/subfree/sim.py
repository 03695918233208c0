"""Synchronous CONGEST round engine with per-edge bandwidth accounting.

A protocol is a factory that builds one :class:`NodeProgram` per vertex from
a :class:`NodeContext`. The context is the only view a program gets of the
network: its own id, ``n``, the ids on its incident edges and a private random
stream. Messages sent in round ``r`` are delivered in round ``r``.

In the directed-broadcast model a node's ``neighbors`` are its in-neighbors,
and ``compose`` returns a single message that goes out on every outgoing arc.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .graph import DiGraph, Graph
from .rng import NodeRandom, node_seed

ACCEPT = "accept"
REJECT = "reject"


class SimError(RuntimeError):
    pass


class BandwidthError(SimError):
    def __init__(self, edge: tuple[int, int], rnd: int, width: int, limit: int):
        super().__init__(f"message on edge {edge} in round {rnd} is {width} bits; limit is {limit}")
        self.edge, self.round, self.width, self.limit = edge, rnd, width, limit


class RoundLimitError(SimError):
    pass


class ProtocolError(SimError):
    """A program addressed a vertex that is not one of its neighbors."""


def id_bits(n: int) -> int:
    """``ceil(log2 n)``, at least 1."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def weight_bits(n: int) -> int:
    return 4 * id_bits(n)


class Layout:
    """Named fields with fixed bit widths."""

    def __init__(self, name: str, **widths: int):
        self.name = name
        self.widths = widths
        self.bits = sum(widths.values())

    def pack(self, **values: int) -> "Message":
        if values.keys() != self.widths.keys():
            raise ValueError(f"{self.name}: expected fields {sorted(self.widths)}, got {sorted(values)}")
        for key, val in values.items():
            if not 0 <= int(val) < (1 << self.widths[key]):
                raise ValueError(f"{self.name}.{key}={val} does not fit in {self.widths[key]} bits")
        return Message(self.name, values, self.bits)


class Message:
    __slots__ = ("kind", "_fields", "bits")

    def __init__(self, kind: str, fields: Mapping[str, int], bits: int):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_fields", dict(fields))
        object.__setattr__(self, "bits", bits)

    def __getattr__(self, key):
        try:
            return self._fields[key]
        except KeyError:
            raise AttributeError(key) from None

    def __setattr__(self, key, value):
        raise AttributeError("messages are immutable")

    def __repr__(self) -> str:
        return f"{self.kind}{self._fields}"


@dataclass(frozen=True)
class SimConfig:
    global_seed: int = 0
    bandwidth_factor: int = 8
    max_rounds: int = 1_000_000
    model: str = "undirected"

    def __post_init__(self):
        if self.bandwidth_factor < 1:
            raise ValueError("bandwidth_factor must be >= 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.model not in ("undirected", "directed"):
            raise ValueError(f"unknown model {self.model!r}")


class NodeContext:
    __slots__ = ("id", "n", "neighbors", "neighbor_set", "random", "attempt", "id_bits")

    def __init__(self, node: int, n: int, neighbors: tuple[int, ...], random: NodeRandom, attempt: int):
        self.id = node
        self.n = n
        self.neighbors = neighbors
        self.neighbor_set = frozenset(neighbors)
        self.random = random
        self.attempt = attempt
        self.id_bits = id_bits(n)

    @property
    def degree(self) -> int:
        return len(self.neighbors)


class NodeProgram:
    """Base class for node programs.

    ``compose(r)`` returns ``{neighbor: Message}`` (undirected), a single
    ``Message`` (directed broadcast) or ``None``. ``receive(r, inbox)`` gets
    ``{sender: Message}``. Programs set ``verdict``/``witness`` and ``halted``.
    """

    def __init__(self, ctx: NodeContext):
        self.ctx = ctx
        self.halted = False
        self.verdict: str | None = None
        self.witness: Any = None

    def compose(self, rnd: int):
        return None

    def receive(self, rnd: int, inbox: dict[int, Message]) -> None:
        pass

    def wake_round(self, rnd: int) -> int:
        """Earliest round ``>= rnd`` in which this node sends or changes state
        if it hears nothing before then. The engine skips rounds in which
        every live node is asleep."""
        return rnd

    def reject(self, witness=None) -> None:
        self.verdict = REJECT
        self.witness = witness

    def finish(self) -> None:
        if self.verdict is None:
            self.verdict = ACCEPT
        self.halted = True


@dataclass
class Transcript:
    rounds: int
    round_bits: dict[int, dict[tuple[int, int], int]]
    outputs: list[str | None]
    node_witnesses: dict[int, Any]
    state: list[Any] = field(default_factory=list, repr=False)

    @property
    def reject(self) -> bool:
        return any(o == REJECT for o in self.outputs)

    @property
    def verdict(self) -> str:
        return REJECT if self.reject else ACCEPT

    @property
    def witnesses(self) -> list[Any]:
        return [self.node_witnesses[v] for v in sorted(self.node_witnesses)]

    @property
    def max_bits(self) -> int:
        return max_bits_per_edge(self)

    def to_dict(self) -> dict:
        hist = []
        for rnd in sorted(self.round_bits):
            counts = Counter(self.round_bits[rnd].values())
            hist.append({"round": rnd, "histogram": {str(b): c for b, c in sorted(counts.items())}})
        return {"rounds": self.rounds, "max_bits": self.max_bits, "verdict": self.verdict,
                "witnesses": [_jsonable(w) for w in self.witnesses],
                "per_round_bit_histogram": hist}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(x):
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def max_bits_per_edge(t: Transcript) -> int:
    return max((b for per in t.round_bits.values() for b in per.values()), default=0)


def run_protocol(g: Graph | DiGraph, factory: Callable[[NodeContext], NodeProgram],
                 cfg: SimConfig = SimConfig(), attempt: int = 0) -> Transcript:
    """Execute one protocol run until every program halts."""
    directed = cfg.model == "directed"
    if directed != g.directed:
        raise SimError(f"model {cfg.model!r} does not match a {'directed' if g.directed else 'undirected'} graph")
    n = g.n
    limit = cfg.bandwidth_factor * id_bits(n)
    if directed:
        receivers, known = g.out_adj, g.in_adj
    else:
        receivers = known = g.adj
    progs = [factory(NodeContext(v, n, known[v], NodeRandom(node_seed(cfg.global_seed, v, attempt)), attempt))
             for v in range(n)]
    round_bits: dict[int, dict[tuple[int, int], int]] = {}
    rnd = 0
    while True:
        live = [p for p in progs if not p.halted]
        if not live:
            break
        nxt = min(p.wake_round(rnd + 1) for p in live)
        nxt = max(nxt, rnd + 1)
        if nxt > cfg.max_rounds:
            raise RoundLimitError(f"protocol still running after {cfg.max_rounds} rounds")
        rnd = nxt
        inbox: dict[int, dict[int, Message]] = {}
        bits: dict[tuple[int, int], int] = {}
        for p in live:
            out = p.compose(rnd)
            if not out:
                continue
            u = p.ctx.id
            if directed:
                if not isinstance(out, Message):
                    raise ProtocolError(f"node {u}: directed model sends one broadcast message per round")
                pairs = [(w, out) for w in receivers[u]]
            else:
                pairs = list(out.items())
            for w, msg in pairs:
                if not directed and w not in p.ctx.neighbor_set:
                    raise ProtocolError(f"node {u} addressed non-neighbor {w}")
                if msg.bits > limit:
                    raise BandwidthError((u, w), rnd, msg.bits, limit)
                bits[(u, w)] = msg.bits
                inbox.setdefault(w, {})[u] = msg
        if bits:
            round_bits[rnd] = bits
        empty: dict[int, Message] = {}
        for p in live:
            p.receive(rnd, inbox.get(p.ctx.id, empty))
    return Transcript(rounds=rnd, round_bits=round_bits,
                      outputs=[p.verdict for p in progs],
                      node_witnesses={p.ctx.id: p.witness for p in progs if p.verdict == REJECT},
                      state=[getattr(p, "export", lambda: None)() for p in progs])


@dataclass
class Verdict:
    """Outcome of a tester run: the global decision plus resource usage."""

    reject: bool
    witness: Any = None
    rounds: int = 0
    max_bits: int | None = None
    attempts: int = 0
    info: dict = field(default_factory=dict)

    @property
    def accept(self) -> bool:
        return not self.reject

    @property
    def decision(self) -> str:
        return REJECT if self.reject else ACCEPT
