"""Exact ground truth for small instances.

Subgraph search is plain backtracking over label-to-vertex maps. Copies are
counted as distinct edge sets, which is the notion every packing argument
uses. Nothing here is clever; it is meant to be obviously correct.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations, permutations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .graph import (MAX_PATTERN_SIZE, DiGraph, Graph, GraphError, Pattern, SizeLimitError,
                    connected_components)

COUNT_MAX_N = 20
DELETION_MAX_N = 14
ENUM_MAX_K = 6
ISO_MAX_N = 10


def _as_graph(h: Pattern | Graph | DiGraph) -> Graph | DiGraph:
    return h.graph if isinstance(h, Pattern) else h


def _search_order(h: Graph | DiGraph) -> list[int]:
    """Connected order starting from a highest-degree label."""
    base = h.underlying() if h.directed else h
    order: list[int] = []
    seen = set()
    for comp_start in sorted(range(h.n), key=lambda v: (-base.degree(v), v)):
        if comp_start in seen:
            continue
        seen.add(comp_start)
        queue = deque([comp_start])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(base.adj[x], key=lambda v: (-base.degree(v), v)):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def embeddings(g: Graph | DiGraph, h: Pattern | Graph | DiGraph,
               colors: Sequence[int] | None = None,
               fixed: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield injective maps ``phi`` (``phi[label] = vertex``) carrying every
    edge of ``h`` onto an edge of ``g``. With ``colors``, only maps where
    ``colors[phi[x]] == x`` are produced."""
    hg = _as_graph(h)
    if hg.n > MAX_PATTERN_SIZE:
        raise SizeLimitError(f"pattern has {hg.n} vertices; at most {MAX_PATTERN_SIZE} supported")
    if hg.directed != g.directed:
        raise GraphError("pattern and host must both be directed or both undirected")
    k = hg.n
    if k > g.n:
        return
    order = _search_order(hg)
    pos = {x: i for i, x in enumerate(order)}
    fixed = dict(fixed or {})
    if hg.directed:
        out_req = [[y for y in hg.out_adj[x] if pos[y] < pos[x]] for x in range(k)]
        in_req = [[y for y in hg.in_adj[x] if pos[y] < pos[x]] for x in range(k)]
        g_out, g_in = g.out_sets, g.in_sets
        need_out = [len(hg.out_adj[x]) for x in range(k)]
        need_in = [len(hg.in_adj[x]) for x in range(k)]
    else:
        back = [[y for y in hg.adj[x] if pos[y] < pos[x]] for x in range(k)]
        g_nb = g.neighbor_sets
        need = [hg.degree(x) for x in range(k)]
    phi = [-1] * k
    used: set[int] = set()

    def adjacent_ok(x: int, v: int) -> bool:
        if hg.directed:
            return (all(v in g_out[phi[y]] for y in in_req[x])
                    and all(v in g_in[phi[y]] for y in out_req[x]))
        return all(v in g_nb[phi[y]] for y in back[x])

    def candidates(x: int):
        if x in fixed:
            pool = [fixed[x]]
        elif hg.directed and (in_req[x] or out_req[x]):
            pool = sorted(g_out[phi[in_req[x][0]]] if in_req[x] else g_in[phi[out_req[x][0]]])
        elif not hg.directed and back[x]:
            pool = sorted(g_nb[phi[back[x][0]]])
        else:
            pool = range(g.n)
        for v in pool:
            if v in used or (colors is not None and colors[v] != x):
                continue
            if hg.directed:
                if len(g.out_adj[v]) < need_out[x] or len(g.in_adj[v]) < need_in[x]:
                    continue
            elif g.degree(v) < need[x]:
                continue
            if adjacent_ok(x, v):
                yield v

    def rec(i: int):
        if i == k:
            yield tuple(phi)
            return
        x = order[i]
        for v in candidates(x):
            phi[x] = v
            used.add(v)
            yield from rec(i + 1)
            used.discard(v)
        phi[x] = -1

    yield from rec(0)


def contains_copy(g: Graph | DiGraph, h: Pattern | Graph | DiGraph) -> tuple[int, ...] | None:
    """First embedding found, or ``None``."""
    return next(embeddings(g, h), None)


def is_copy(g: Graph | DiGraph, h: Pattern | Graph | DiGraph, phi: Sequence[int]) -> bool:
    """Whether ``phi`` is an injective map of ``h`` into ``g`` preserving edges."""
    hg = _as_graph(h)
    if len(phi) != hg.n or len(set(phi)) != hg.n:
        return False
    if any(not (0 <= v < g.n) for v in phi):
        return False
    return all(g.has_edge(phi[x], phi[y]) for x, y in hg.edges)


def copy_edges(h: Pattern | Graph | DiGraph, phi: Sequence[int]) -> frozenset[tuple[int, int]]:
    hg = _as_graph(h)
    if hg.directed:
        return frozenset((phi[x], phi[y]) for x, y in hg.edges)
    return frozenset((min(phi[x], phi[y]), max(phi[x], phi[y])) for x, y in hg.edges)


def distinct_copies(g: Graph | DiGraph, h: Pattern | Graph | DiGraph) -> list[tuple[tuple[int, int], ...]]:
    """Every copy of ``h`` as a sorted tuple of host edges, in lexicographic order."""
    found = {tuple(sorted(copy_edges(h, phi))) for phi in embeddings(g, h)}
    return sorted(found)


def count_copies(g: Graph | DiGraph, h: Pattern | Graph | DiGraph) -> int:
    if g.n > COUNT_MAX_N:
        raise SizeLimitError(f"count_copies supports n <= {COUNT_MAX_N}, got n={g.n}")
    return len(distinct_copies(g, h))


def packing_lb(g: Graph | DiGraph, h: Pattern | Graph | DiGraph) -> tuple[int, list[tuple[tuple[int, int], ...]]]:
    """Greedy maximal edge-disjoint packing, scanning copies lexicographically."""
    used: set[tuple[int, int]] = set()
    chosen = []
    for c in distinct_copies(g, h):
        if used.isdisjoint(c):
            used.update(c)
            chosen.append(c)
    return len(chosen), chosen


def min_deletion_to_h_free(g: Graph | DiGraph, h: Pattern | Graph | DiGraph) -> int:
    """Fewest edge deletions that leave no copy of ``h`` (exact)."""
    if g.n > DELETION_MAX_N:
        raise SizeLimitError(f"min_deletion_to_h_free supports n <= {DELETION_MAX_N}, got n={g.n}")
    copies = distinct_copies(g, h)
    if not copies:
        return 0
    index = {e: i for i, e in enumerate(g.edges)}
    masks = [sum(1 << index[e] for e in c) for c in copies]

    def disjoint_lb(deleted: int) -> int:
        taken, count = 0, 0
        for mk in masks:
            if mk & deleted == 0 and mk & taken == 0:
                taken |= mk
                count += 1
        return count

    def feasible(deleted: int, kept: int, budget: int) -> bool:
        hit = next((mk for mk in masks if mk & deleted == 0), None)
        if hit is None:
            return True
        if budget == 0 or disjoint_lb(deleted) > budget:
            return False
        bits = hit & ~kept
        while bits:
            low = bits & -bits
            if feasible(deleted | low, kept, budget - 1):
                return True
            kept |= low
            bits ^= low
        return False

    d = disjoint_lb(0)
    while not feasible(0, 0, d):
        d += 1
    return d


# ---------------------------------------------------------- small graphs

def _pair_index(k: int) -> dict[tuple[int, int], int]:
    return {p: i for i, p in enumerate(combinations(range(k), 2))}


def enumerate_connected(k: int) -> list[Pattern]:
    """Connected graphs on ``k`` vertices, one per isomorphism class.

    The representative of a class is the member whose adjacency bit-string
    (pairs in lexicographic order, first pair most significant) is smallest.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    if k > ENUM_MAX_K:
        raise SizeLimitError(f"enumerate_connected supports k <= {ENUM_MAX_K}")
    pairs = list(combinations(range(k), 2))
    npairs = len(pairs)
    if npairs == 0:
        return [Pattern(Graph(1), name="K1")]
    codes = np.arange(1 << npairs, dtype=np.int64)
    # bit (npairs-1-i) of a code is pair i
    bits = ((codes[:, None] >> (npairs - 1 - np.arange(npairs))) & 1).astype(bool)
    connected = np.array([_bits_connected(k, pairs, row) for row in bits])
    bits, codes = bits[connected], codes[connected]
    pidx = _pair_index(k)
    canon = codes.copy()
    for perm in permutations(range(k)):
        target = [pidx[tuple(sorted((perm[a], perm[b])))] for a, b in pairs]
        weights = np.zeros(npairs, dtype=np.int64)
        for i, t in enumerate(target):
            weights[i] = 1 << (npairs - 1 - t)
        canon = np.minimum(canon, bits.astype(np.int64) @ weights)
    reps = sorted(set(canon.tolist()), key=lambda c: (bin(c).count("1"), c))
    out = []
    for c in reps:
        edges = [pairs[i] for i in range(npairs) if c >> (npairs - 1 - i) & 1]
        out.append(Pattern(Graph(k, edges), name=f"G{k}_{c}"))
    return out


def _bits_connected(k: int, pairs, row) -> bool:
    g = Graph(k, [p for p, b in zip(pairs, row) if b])
    return len(connected_components(g)) == 1


def are_isomorphic(g1: Graph | DiGraph | Pattern, g2: Graph | DiGraph | Pattern) -> bool:
    a, b = _as_graph(g1), _as_graph(g2)
    if max(a.n, b.n) > ISO_MAX_N:
        raise SizeLimitError(f"are_isomorphic supports graphs with at most {ISO_MAX_N} vertices")
    if a.directed != b.directed or a.n != b.n or a.m != b.m:
        return False
    if a.directed:
        sig = lambda g: sorted((len(g.out_adj[v]), len(g.in_adj[v])) for v in range(g.n))
    else:
        sig = lambda g: sorted(g.degree(v) for v in range(g.n))
    if sig(a) != sig(b):
        return False
    if a.n == 0:
        return True
    return next(_embed_any(b, a), None) is not None


def _embed_any(host, pat):
    # bypasses the pattern size cap; are_isomorphic enforces its own bound
    if pat.n <= MAX_PATTERN_SIZE:
        return embeddings(host, pat)
    return _embed_large(host, pat)


def _embed_large(host, pat):
    for perm in permutations(range(host.n)):
        if all(host.has_edge(perm[x], perm[y]) for x, y in pat.edges):
            yield perm


def is_in_h_class(h: Pattern | Graph) -> tuple[int, int] | None:
    """Smallest edge ``(u, v)`` whose endpoints meet every cycle, else ``None``."""
    hg = _as_graph(h)
    if len(connected_components(hg)) != 1:
        raise GraphError("pattern must be connected")
    for u, v in hg.edges:
        rest = [x for x in range(hg.n) if x not in (u, v)]
        sub = hg.induced(rest)
        if sub.m == sub.n - len(connected_components(sub)):
            return (u, v)
    return None
