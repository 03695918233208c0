"""Instances with certificates.

Planted instances carry their edge-disjoint copies; every copy needs at least
one deletion, so ``len(planted) / m`` lower-bounds the distance to freeness
and ``eps_certified = len(planted) * |E(H)| / m`` is the packing density the
testers' guarantees consume. Free instances are built from a structural
obstruction and then confirmed by the exact oracle.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from itertools import combinations, product

from .graph import Graph, GraphError, Pattern, connected_components
from .oracle import contains_copy, copy_edges, is_copy


class InfeasibleError(GraphError):
    pass


@dataclass
class PlantedInstance:
    graph: Graph
    pattern: Pattern
    planted: list[tuple[int, ...]]
    eps_certified: float

    def sidecar(self) -> dict:
        return {"pattern": self.pattern.name, "planted": [list(p) for p in self.planted],
                "eps_certified": self.eps_certified}

    def to_json(self) -> str:
        return json.dumps(self.sidecar(), sort_keys=True)


def plant_disjoint_copies(n: int, target_m: int, h: Pattern, target_eps: float, seed: int = 0,
                          max_tries: int = 20000) -> PlantedInstance:
    """At least ``ceil(target_eps * target_m / |E(H)|)`` edge-disjoint copies
    of ``h`` padded with filler edges up to ``target_m`` edges."""
    if h.directed:
        raise GraphError("planting is implemented for undirected patterns")
    if not 0 < target_eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {target_eps}")
    eh, k = h.num_edges, h.k
    q = math.ceil(target_eps * target_m / eh - 1e-9)
    if q * eh > target_m:
        raise InfeasibleError(f"edge budget: {q} copies need {q * eh} edges, target m={target_m}")
    if k > n:
        raise InfeasibleError(f"vertex budget: pattern has {k} vertices, n={n}")
    if q * eh > n * (n - 1) // 2:
        raise InfeasibleError(f"edge budget: {q * eh} edges exceed C(n,2)={n * (n - 1) // 2}")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    used: set[tuple[int, int]] = set()
    planted = []
    if q * k <= n:
        for c in range(q):
            phi = tuple(perm[c * k:(c + 1) * k])
            planted.append(phi)
            used |= copy_edges(h, phi)
    else:
        tries = 0
        while len(planted) < q:
            tries += 1
            if tries > max_tries:
                raise InfeasibleError(f"vertex budget: placed {len(planted)} of {q} edge-disjoint copies "
                                      f"on n={n} after {max_tries} tries")
            phi = tuple(rng.sample(range(n), k))
            es = copy_edges(h, phi)
            if used.isdisjoint(es):
                planted.append(phi)
                used |= es
    free = [v for v in perm if all(v not in p for p in planted)]
    filler = target_m - len(used)
    edges = set(used) | _filler(n, used, free, filler, h, rng)
    g = Graph(n, edges)
    for phi in planted:
        assert is_copy(g, h, phi)
    return PlantedInstance(g, h, planted, len(planted) * eh / g.m)


def _has_cycle(p: Pattern) -> bool:
    return p.graph.m > p.graph.n - 1


def _filler(n: int, used: set[tuple[int, int]], free: list[int], count: int, h: Pattern,
            rng: random.Random) -> set[tuple[int, int]]:
    """``count`` extra edges. When ``h`` has a cycle they join distinct
    components, so no new cycle appears; when ``h`` is a tree they stay
    inside blocks of ``k - 1`` vertices outside every planted copy."""
    if count <= 0:
        return set()
    out: set[tuple[int, int]] = set()
    if _has_cycle(h):
        root = list(range(n))

        def find(x: int) -> int:
            while root[x] != x:
                root[x] = root[root[x]]
                x = root[x]
            return x

        for a, b in used:
            root[find(a)] = find(b)
        comps = len({find(v) for v in range(n)})
        if count > comps - 1:
            raise InfeasibleError(f"filler budget: {count} acyclic filler edges need {count + 1} "
                                  f"components, have {comps}")
        while len(out) < count:
            a, b = rng.randrange(n), rng.randrange(n)
            if find(a) != find(b):
                root[find(a)] = find(b)
                out.add((min(a, b), max(a, b)))
        return out
    block = h.k - 1
    order = free[:]
    rng.shuffle(order)
    pairs = [(min(a, b), max(a, b)) for i in range(0, len(order), max(block, 1))
             for a, b in combinations(order[i:i + block], 2)]
    if count > len(pairs):
        raise InfeasibleError(f"filler budget: blocks of {block} free vertices hold {len(pairs)} edges, "
                              f"need {count}")
    return set(rng.sample(pairs, count))


def chromatic_number(g: Graph) -> int:
    for c in range(1, g.n + 1):
        if _colorable(g, c):
            return c
    return g.n


def _colorable(g: Graph, c: int) -> bool:
    col = [-1] * g.n

    def rec(v: int) -> bool:
        if v == g.n:
            return True
        for x in range(c):
            if all(col[u] != x for u in g.adj[v]):
                col[v] = x
                if rec(v + 1):
                    return True
        col[v] = -1
        return False

    return rec(0)


def _girth_filtered(n: int, m: int, k: int, rng: random.Random) -> set[tuple[int, int]]:
    """Random edges, skipping any that would close a cycle of length <= k."""
    adj: list[set[int]] = [set() for _ in range(n)]
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    edges = set()
    for a, b in pairs:
        if len(edges) == m:
            break
        if _dist_at_most(adj, a, b, k - 1):
            continue
        adj[a].add(b)
        adj[b].add(a)
        edges.add((a, b))
    if len(edges) < m:
        raise InfeasibleError(f"girth construction reached only {len(edges)} of {m} edges")
    return edges


def _dist_at_most(adj, a: int, b: int, d: int) -> bool:
    frontier, seen = {a}, {a}
    for _ in range(d):
        frontier = {y for x in frontier for y in adj[x]} - seen
        if b in frontier:
            return True
        seen |= frontier
        if not frontier:
            return False
    return False


def make_h_free(n: int, m: int, h: Pattern, seed: int = 0, max_retries: int = 20) -> Graph:
    """Random graph with ``m`` edges and no copy of ``h``.

    Non-bipartite ``h``: a random ``(chi(h) - 1)``-partite graph. Trees:
    disjoint blocks of ``k - 1`` vertices. Other bipartite patterns: girth
    larger than ``k``. The result is checked with the exact oracle.
    """
    if h.directed:
        raise GraphError("make_h_free handles undirected patterns")
    k = h.k
    chi = chromatic_number(h.graph)
    for attempt in range(max_retries):
        rng = random.Random(f"{seed}:{attempt}")
        if chi >= 3:
            parts = [rng.randrange(chi - 1) for _ in range(n)]
            pairs = [(a, b) for a, b in combinations(range(n), 2) if parts[a] != parts[b]]
            if m > len(pairs):
                raise InfeasibleError(f"a {chi - 1}-partite graph on {n} vertices has at most {len(pairs)} edges")
            edges = rng.sample(pairs, m)
        elif not _has_cycle(h):
            block = max(1, k - 1)
            pairs = [(a, b) for a, b in combinations(range(n), 2) if a // block == b // block]
            if m > len(pairs):
                raise InfeasibleError(f"blocks of {block} vertices allow at most {len(pairs)} edges")
            perm = list(range(n))
            rng.shuffle(perm)
            edges = [(min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in rng.sample(pairs, m)]
        else:
            edges = _girth_filtered(n, m, k, rng)
        g = Graph(n, edges)
        if contains_copy(g, h) is None:
            return g
    raise InfeasibleError(f"no {h.name}-free graph found after {max_retries} retries")


def disjoint_copies(h: Pattern | Graph, copies: int) -> Graph:
    """``copies`` vertex-disjoint copies of ``h``."""
    g = h.graph if isinstance(h, Pattern) else h
    k = g.n
    return Graph(k * copies, [(a + c * k, b + c * k) for c in range(copies) for a, b in g.edges])


def random_graph(n: int, p: float, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    return Graph(n, [(a, b) for a, b in combinations(range(n), 2) if rng.random() < p])
