import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st
from networkx.algorithms import isomorphism

from subfree import oracle
from subfree.graph import DiGraph, Graph, SizeLimitError, complete_graph, cycle_graph, path_graph, pattern_from_name
from subfree.generators import disjoint_copies
from strategies import digraphs, graphs

K3 = pattern_from_name("K3")


def petersen() -> Graph:
    ref = nx.petersen_graph()
    return Graph(10, ref.edges)


def to_nx(g):
    ref = nx.DiGraph() if g.directed else nx.Graph()
    ref.add_nodes_from(range(g.n))
    ref.add_edges_from(g.edges)
    return ref


def test_contains_examples():
    phi = oracle.contains_copy(complete_graph(4), K3)
    assert phi is not None and len(phi) == 3
    assert oracle.contains_copy(cycle_graph(4), K3) is None
    phi = oracle.contains_copy(petersen(), pattern_from_name("C5"))
    assert phi is not None and oracle.is_copy(petersen(), pattern_from_name("C5"), phi)


def test_count_examples():
    assert oracle.count_copies(complete_graph(4), K3) == 4
    assert oracle.count_copies(complete_graph(4), pattern_from_name("C4")) == 3
    assert oracle.count_copies(cycle_graph(5), K3) == 0


def test_packing_examples():
    assert oracle.packing_lb(complete_graph(4), K3)[0] == 1
    assert oracle.packing_lb(disjoint_copies(K3, 100), K3)[0] == 100
    assert oracle.packing_lb(complete_graph(5), K3)[0] >= 2


def test_min_deletion_examples():
    assert oracle.min_deletion_to_h_free(complete_graph(4), K3) == 2
    assert oracle.min_deletion_to_h_free(cycle_graph(3), K3) == 1
    assert oracle.min_deletion_to_h_free(cycle_graph(5), pattern_from_name("C5")) == 1
    assert oracle.min_deletion_to_h_free(complete_graph(6), K3) == 6


def test_enumerate_counts():
    assert [len(oracle.enumerate_connected(k)) for k in range(1, 7)] == [1, 1, 2, 6, 21, 112]


def test_enumerate_pairwise_non_isomorphic():
    gs = oracle.enumerate_connected(5)
    for a, b in itertools.combinations(gs, 2):
        assert not oracle.are_isomorphic(a, b)
        assert not nx.is_isomorphic(to_nx(a.graph), to_nx(b.graph))


def test_isomorphism_examples():
    c5 = cycle_graph(5)
    assert oracle.are_isomorphic(c5, c5.relabel([3, 0, 4, 1, 2]))
    assert not oracle.are_isomorphic(c5, path_graph(5))
    k4_minus = Graph(4, [e for e in complete_graph(4).edges if e != (2, 3)])
    c4_chord = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    assert oracle.are_isomorphic(k4_minus, c4_chord)


def test_size_limits():
    with pytest.raises(SizeLimitError):
        oracle.count_copies(Graph(21), K3)
    with pytest.raises(SizeLimitError):
        oracle.min_deletion_to_h_free(Graph(15), K3)
    with pytest.raises(SizeLimitError):
        oracle.enumerate_connected(7)
    with pytest.raises(SizeLimitError):
        oracle.are_isomorphic(Graph(11), Graph(11))


SMALL_PATTERNS = ["K3", "C4", "P3", "diamond", "S4", "C5", "K4", "T:0,1,1"]


@given(graphs(max_n=9), st.sampled_from(SMALL_PATTERNS))
def test_contains_matches_networkx(g, name):
    h = pattern_from_name(name)
    gm = isomorphism.GraphMatcher(to_nx(g), to_nx(h.graph))
    assert (oracle.contains_copy(g, h) is not None) == gm.subgraph_is_monomorphic()


@given(digraphs(max_n=7), st.sampled_from(["dir-diamond", "DC3", "DT:0,0"]))
def test_directed_contains_matches_networkx(g, name):
    h = pattern_from_name(name)
    gm = isomorphism.DiGraphMatcher(to_nx(g), to_nx(h.graph))
    assert (oracle.contains_copy(g, h) is not None) == gm.subgraph_is_monomorphic()


@given(graphs(max_n=7), st.sampled_from(["K3", "C4", "P3"]))
def test_oracle_invariants(g, name):
    h = pattern_from_name(name)
    count = oracle.count_copies(g, h)
    packed, copies = oracle.packing_lb(g, h)
    deletion = oracle.min_deletion_to_h_free(g, h)
    assert (count > 0) == (oracle.contains_copy(g, h) is not None)
    assert packed <= count and packed <= deletion <= g.m
    used = [e for c in copies for e in c]
    assert len(used) == len(set(used))


@given(graphs(max_n=6))
def test_min_deletion_is_optimal(g):
    best = next(r for r in range(g.m + 1)
                if any(oracle.contains_copy(Graph(g.n, set(g.edges) - set(d)), K3) is None
                       for d in itertools.combinations(g.edges, r)))
    assert oracle.min_deletion_to_h_free(g, K3) == best


def test_count_matches_networkx_monomorphisms():
    g = petersen()
    h = pattern_from_name("C5")
    gm = isomorphism.GraphMatcher(to_nx(g), to_nx(h.graph))
    edge_sets = {frozenset(frozenset((a, b)) for a, b in
                           ((inv[x], inv[y]) for x, y in h.graph.edges))
                 for mapping in gm.subgraph_monomorphisms_iter()
                 for inv in [{v: k for k, v in mapping.items()}]}
    assert len(oracle.distinct_copies(g, h)) == len(edge_sets) == 12


def test_h_class_membership_oracle():
    assert oracle.is_in_h_class(complete_graph(5)) is None
    assert oracle.is_in_h_class(complete_graph(4)) is not None
    assert oracle.is_in_h_class(cycle_graph(5)) == (0, 1)


def test_directed_pattern_on_undirected_host():
    with pytest.raises(Exception):
        oracle.contains_copy(cycle_graph(3), pattern_from_name("DC3"))
    assert oracle.contains_copy(DiGraph(3, [(0, 1), (1, 2), (2, 0)]), pattern_from_name("DC3")) is not None
