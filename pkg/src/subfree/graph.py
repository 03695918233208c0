"""Immutable simple graphs, patterns, and the edge-list text format.

Vertices are the dense integers ``0..n-1``. Graphs never change after
construction, so the same instance can be shared by concurrent trials.
"""
from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_PATTERN_SIZE = 8


class GraphError(ValueError):
    """Invalid graph structure (self-loop, duplicate edge, bad vertex id)."""


class SizeLimitError(RuntimeError):
    """An exact computation was asked to run beyond its supported size."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Graph:
    """Undirected simple graph on vertices ``0..n-1``."""

    directed = False

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        self._edge_set = frozenset(seen)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adj)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with each neighbor list sorted ascending."""
        return _csr(self.adj)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def induced(self, vertices: Sequence[int]) -> "Graph":
        index = {v: i for i, v in enumerate(vertices)}
        return Graph(len(vertices), [(index[u], index[v]) for u, v in self.edges
                                     if u in index and v in index])

    def disjoint_union(self, other: "Graph") -> "Graph":
        off = self.n
        return Graph(self.n + other.n,
                     list(self.edges) + [(u + off, v + off) for u, v in other.edges])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and not isinstance(other, DiGraph)
                and self.n == other.n and self.edges == other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class DiGraph:
    """Directed simple graph; ``arcs`` are ordered pairs ``(tail, head)``."""

    directed = True

    def __init__(self, n: int, arcs: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        seen = set()
        for a in arcs:
            u, v = int(a[0]), int(a[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"arc ({u}, {v}) out of range for n={n}")
            if (u, v) in seen:
                raise GraphError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
        self.n = n
        self.arcs: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        self._arc_set = frozenset(seen)
        out: list[list[int]] = [[] for _ in range(n)]
        inc: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.arcs:
            out[u].append(v)
            inc[v].append(u)
        self.out_adj = tuple(tuple(sorted(a)) for a in out)
        self.in_adj = tuple(tuple(sorted(a)) for a in inc)

    @property
    def m(self) -> int:
        return len(self.arcs)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self.arcs

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._arc_set

    has_edge = has_arc

    @cached_property
    def out_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.out_adj)

    @cached_property
    def in_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.in_adj)

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.out_adj)

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _csr(self.in_adj)

    def underlying(self) -> Graph:
        return Graph(self.n, {(min(u, v), max(u, v)) for u, v in self.arcs})

    def __eq__(self, other) -> bool:
        return isinstance(other, DiGraph) and self.n == other.n and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.n, self.arcs, "d"))

    def __repr__(self) -> str:
        return f"DiGraph(n={self.n}, m={self.m})"


def _csr(adj) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(len(adj) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.fromiter((v for a in adj for v in a), dtype=np.int32, count=int(indptr[-1]))
    return indptr, indices


class Pattern:
    """A small connected forbidden subgraph on labels ``0..k-1``."""

    def __init__(self, graph: Graph | DiGraph, name: str | None = None):
        if graph.n > MAX_PATTERN_SIZE:
            raise GraphError(f"pattern has {graph.n} vertices; at most {MAX_PATTERN_SIZE} supported")
        if graph.n == 0:
            raise GraphError("pattern must have at least one vertex")
        base = graph.underlying() if graph.directed else graph
        if len(connected_components(base)) != 1:
            raise GraphError("pattern must be connected")
        self.graph = graph
        self.name = name or f"H{graph.n}_{graph.m}"

    @property
    def k(self) -> int:
        return self.graph.n

    @property
    def num_edges(self) -> int:
        return self.graph.m

    @property
    def directed(self) -> bool:
        return self.graph.directed

    def __repr__(self) -> str:
        return f"Pattern({self.name}, k={self.k}, |E|={self.num_edges})"


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex sets of the connected components, each sorted, ordered by minimum."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def diameter(g: Graph) -> int:
    """Diameter of a connected graph (0 for a single vertex)."""
    best = 0
    for s in range(g.n):
        d = bfs_distances(g, s)
        if min(d) < 0:
            raise GraphError("diameter of a disconnected graph is undefined")
        best = max(best, max(d))
    return best


# ---------------------------------------------------------------- text format

def parse_edge_list(text: str) -> Graph | DiGraph:
    """Parse ``"n m [directed]"`` followed by ``m`` lines ``"u v"``."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(1, "missing header 'n m'")
    lineno, header = lines[0]
    parts = header.split()
    directed = len(parts) == 3 and parts[2] == "directed"
    if len(parts) != 2 and not directed:
        raise ParseError(lineno, f"expected 'n m' or 'n m directed', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(lineno, f"non-integer header {header!r}") from None
    if n < 0 or m < 0:
        raise ParseError(lineno, "negative vertex or edge count")
    pairs = []
    for lineno, ln in lines[1:]:
        tok = ln.split()
        if len(tok) != 2:
            raise ParseError(lineno, f"expected 'u v', got {ln!r}")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer vertex in {ln!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(lineno, f"vertex out of range 0..{n - 1} in {ln!r}")
        pairs.append((u, v))
    if len(pairs) != m:
        raise ParseError(lines[0][0], f"header declares {m} edges but {len(pairs)} were listed")
    return DiGraph(n, pairs) if directed else Graph(n, pairs)


def write_edge_list(g: Graph | DiGraph) -> str:
    header = f"{g.n} {g.m}" + (" directed" if g.directed else "")
    return "\n".join([header] + [f"{u} {v}" for u, v in g.edges])


# ----------------------------------------------------------- named patterns

def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise GraphError(f"cycle length must be at least 3, got {k}")
    return Graph(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(s: int) -> Graph:
    return Graph(s, [(i, j) for i in range(s) for j in range(i + 1, s)])


def path_graph(k: int) -> Graph:
    return Graph(k, [(i, i + 1) for i in range(k - 1)])


def star_graph(k: int) -> Graph:
    """Star on ``k`` vertices with centre 0."""
    return Graph(k, [(0, i) for i in range(1, k)])


def tree_from_parents(parents: Sequence[int]) -> Graph:
    """Tree on ``len(parents)+1`` vertices where ``parents[i-1]`` is the parent of ``i``."""
    return Graph(len(parents) + 1, [(i + 1, p) for i, p in enumerate(parents)])


def directed_tree_from_parents(parents: Sequence[int]) -> DiGraph:
    """Tree oriented towards the root 0: arcs run child -> parent."""
    return DiGraph(len(parents) + 1, [(i + 1, p) for i, p in enumerate(parents)])


def directed_diamond() -> DiGraph:
    return DiGraph(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def directed_cycle(k: int) -> DiGraph:
    return DiGraph(k, [(i, (i + 1) % k) for i in range(k)])


def pattern_from_name(name: str) -> Pattern:
    """Resolve ``C5``, ``K4``, ``P3``, ``S4``, ``DC3``, ``diamond``, ``dir-diamond``,
    ``T:0,0,1`` (tree given by its parent array) or ``DT:0,0,1`` (the same
    tree with arcs pointing to the root)."""
    key = name.strip()
    upper = key.upper()
    if upper.startswith("DT:"):
        parents = [int(x) for x in key[3:].split(",") if x.strip()]
        return Pattern(directed_tree_from_parents(parents), name=key)
    if upper.startswith("T:"):
        parents = [int(x) for x in key[2:].split(",") if x.strip()]
        return Pattern(tree_from_parents(parents), name=key)
    if upper == "DIAMOND":
        return Pattern(Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]), name="diamond")
    if upper == "DIR-DIAMOND":
        return Pattern(directed_diamond(), name="dir-diamond")
    builders = {"DC": directed_cycle, "C": cycle_graph, "K": complete_graph,
                "P": path_graph, "S": star_graph}
    for prefix, build in builders.items():
        if upper.startswith(prefix) and upper[len(prefix):].isdigit():
            return Pattern(build(int(upper[len(prefix):])), name=upper)
    raise GraphError(f"unknown pattern name {name!r}")
