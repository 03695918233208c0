import pytest
from hypothesis import given
from hypothesis import strategies as st

from subfree import oracle
from subfree.graph import DiGraph, Graph, GraphError, cycle_graph, path_graph, pattern_from_name
from subfree.trees import TreePattern, all_trees, check_tree, test_t_freeness as t_test, tree_repetitions
from strategies import digraphs, graphs


def test_all_trees_counts():
    trees = all_trees(5)
    assert [sum(t.k == k for t in trees) for k in (2, 3, 4, 5)] == [1, 1, 2, 3]
    assert len([t for t in trees if t.k >= 3]) == 6


def test_tree_pattern_validation():
    with pytest.raises(GraphError):
        TreePattern([1, 0])
    with pytest.raises(GraphError):
        TreePattern.from_pattern(cycle_graph(3))
    t = TreePattern.from_pattern(pattern_from_name("S4"))
    assert t.depth == 1 and t.k == 4


def test_check_tree_examples():
    edge = TreePattern([0])
    g = Graph(2, [(0, 1)])
    assert check_tree(g, edge, [0, 1]) == {0}
    assert check_tree(g, edge, [0, 0]) == set()
    path = TreePattern([0, 1])
    p = path_graph(3)
    assert check_tree(p, path, [0, 1, 2]) == {0}
    assert check_tree(p, path, [2, 1, 0]) == {2}


def test_repetitions():
    assert tree_repetitions(3) == 270


def test_triangle_contains_path():
    t = TreePattern.from_pattern(pattern_from_name("P3"))
    rate = sum(t_test(cycle_graph(3), t, seed=s).reject for s in range(100)) / 100
    assert rate >= 0.9


def test_isolated_vertices_accept():
    for t in all_trees(4):
        assert not t_test(Graph(5), t, seed=1).reject


def brute_closed(g, t, colors):
    hits = set()
    for phi in oracle.embeddings(g, t.graph, colors=colors):
        hits.add(phi[0])
    return hits


@given(graphs(min_n=2, max_n=8), st.sampled_from(all_trees(4)), st.data())
def test_check_tree_matches_brute_force(g, t, data):
    colors = data.draw(st.lists(st.integers(0, t.k - 1), min_size=g.n, max_size=g.n))
    assert check_tree(g, t, colors) == brute_closed(g, t, colors)


@given(digraphs(min_n=2, max_n=7), st.sampled_from(["DT:0", "DT:0,0", "DT:0,1", "DT:0,0,1"]), st.data())
def test_directed_check_tree_matches_brute_force(g, name, data):
    t = TreePattern.from_pattern(pattern_from_name(name))
    colors = data.draw(st.lists(st.integers(0, t.k - 1), min_size=g.n, max_size=g.n))
    assert check_tree(g, t, colors) == brute_closed(g, t, colors)


@given(graphs(min_n=2, max_n=9, max_p=0.3), st.sampled_from(all_trees(5)), st.integers(0, 999))
def test_reject_implies_copy(g, t, seed):
    v = t_test(g, t, seed=seed, repetitions=30)
    if v.reject:
        assert oracle.is_copy(g, t.graph, v.witness)


@given(graphs(min_n=2, max_n=8, max_p=0.3), st.integers(0, 999))
def test_engines_agree(g, seed):
    t = TreePattern.from_pattern(pattern_from_name("T:0,0,1"))
    a = t_test(g, t, seed=seed, repetitions=12)
    b = t_test(g, t, seed=seed, repetitions=12, engine="sim")
    assert (a.reject, a.witness, a.attempts) == (b.reject, b.witness, b.attempts)


def test_model_mismatch():
    t = TreePattern.from_pattern(pattern_from_name("P3"))
    with pytest.raises(GraphError):
        t_test(DiGraph(3, [(0, 1)]), t)
