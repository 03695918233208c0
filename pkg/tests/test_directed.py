import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from subfree import oracle
from subfree.directed import (DIAMOND, diamond_attempt_count, gen_gapdisj, is_strongly_connected,
                              random_gapdisj, test_directed_ck as dck_test,
                              test_directed_diamond as diamond_test)
from subfree.graph import DiGraph, GraphError, cycle_graph, directed_cycle, pattern_from_name
from strategies import digraphs


def test_paper_gadget_examples():
    inst = gen_gapdisj(3, {1}, {1})
    phi = oracle.contains_copy(inst.graph, DIAMOND)
    assert phi is not None
    assert is_strongly_connected(inst.graph)
    assert inst.graph.has_arc(inst.ids["A"], inst.ids["1"])


def test_paper_gadget_has_diamonds_without_overlap():
    # the skeleton alone already contains A -> i -> C3 <- i' <- A
    inst = gen_gapdisj(3, set(), set())
    assert oracle.contains_copy(inst.graph, DIAMOND) is not None


@pytest.mark.parametrize("X, Y", [({1}, {1}), ({1}, {2}), (set(), set()), ({1, 2}, {2, 3}), ({1, 2, 3}, set())])
def test_repaired_gadget_encodes_intersection(X, Y):
    inst = gen_gapdisj(3, X, Y, gadget="repaired")
    assert (oracle.contains_copy(inst.graph, DIAMOND) is not None) == bool(X & Y)
    assert is_strongly_connected(inst.graph)


def test_repaired_packing_matches_overlap():
    inst = random_gapdisj(8, 3, seed=4, gadget="repaired")
    assert len(inst.X & inst.Y) == 3
    assert oracle.packing_lb(inst.graph, DIAMOND)[0] >= 3


def test_gadget_validation():
    with pytest.raises(ValueError):
        gen_gapdisj(3, {4}, set())
    with pytest.raises(ValueError):
        gen_gapdisj(3, set(), set(), gadget="other")
    with pytest.raises(ValueError):
        random_gapdisj(3, 4, seed=0)


def test_random_overlap_exact():
    for seed in range(20):
        inst = random_gapdisj(10, seed % 4, seed=seed, gadget="repaired")
        assert len(inst.X & inst.Y) == seed % 4


def test_diamond_attempts():
    assert diamond_attempt_count(1.0) == 5120


def test_diamond_tester_on_instances():
    for seed in range(10):
        yes = random_gapdisj(10, 3, seed=seed, gadget="repaired")
        no = random_gapdisj(10, 0, seed=seed, gadget="repaired")
        v = diamond_test(yes.graph, 0.3, seed=seed)
        assert v.reject and oracle.is_copy(yes.graph, DIAMOND, v.witness)
        assert not diamond_test(no.graph, 0.3, seed=seed).reject


def test_planted_diamond_in_random_dag():
    rng = random.Random(5)
    arcs = {(u, v) for u in range(20) for v in range(u + 1, 20) if rng.random() < 0.08}
    arcs |= {(0, 7), (0, 9), (7, 15), (9, 15)}
    g = DiGraph(20, arcs)
    assert oracle.contains_copy(g, DIAMOND) is not None
    rate = sum(diamond_test(g, 4 / g.m, seed=s).reject for s in range(12)) / 12
    assert rate >= 2 / 3


@given(digraphs(min_n=4, max_n=9), st.integers(0, 999))
def test_diamond_sound_and_engines_agree(g, seed):
    a = diamond_test(g, 1.0, seed=seed, attempts=60)
    b = diamond_test(g, 1.0, seed=seed, attempts=60, engine="sim")
    assert (a.reject, a.witness, a.attempts) == (b.reject, b.witness, b.attempts)
    if a.reject:
        assert oracle.is_copy(g, DIAMOND, a.witness)


def test_directed_ck_examples():
    rate = sum(dck_test(directed_cycle(3), 3, 1.0, seed=s).reject for s in range(30)) / 30
    assert rate >= 2 / 3
    dag = DiGraph(6, [(u, v) for u in range(6) for v in range(u + 1, 6)])
    assert not any(dck_test(dag, 3, 1.0, seed=s).reject for s in range(5))
    assert not any(dck_test(directed_cycle(4), 3, 1.0, seed=s).reject for s in range(5))


@given(digraphs(min_n=3, max_n=8), st.integers(3, 4), st.integers(0, 999))
def test_directed_ck_sound(g, k, seed):
    v = dck_test(g, k, 1.0, seed=seed, attempts=40)
    if v.reject:
        assert oracle.is_copy(g, pattern_from_name(f"DC{k}"), v.witness)


def test_model_errors():
    with pytest.raises(GraphError):
        diamond_test(cycle_graph(4), 1.0)
    with pytest.raises(GraphError):
        dck_test(cycle_graph(4), 3, 1.0)
