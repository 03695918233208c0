"""Every backend must agree with the simulator attempt by attempt."""
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfree import kernels
from subfree.cycles import simulate_ck_attempt
from subfree.directed import simulate_diamond_attempt
from subfree.graph import pattern_from_name
from subfree.hclass import HMember, build_plan, simulate_checkh_attempt
from subfree.trees import TreePattern, simulate_tree_attempt
from strategies import digraphs, graphs

BACKENDS = [kernels.backend(name) for name in kernels.available()]
ATTEMPTS = 6
seeds = st.integers(0, 2 ** 32)


def per_attempt(kernel, sim):
    for a in range(ATTEMPTS):
        expect = sim(a).reject
        for kb in BACKENDS:
            assert (kernel(kb, a) >= 0) == expect, (kb.__name__, a)


def test_backend_listing():
    assert "python" in kernels.available()
    assert kernels.BACKEND in kernels.available()
    with pytest.raises(ValueError):
        kernels.backend("fortran")


def test_pure_env_forces_fallback():
    code = "from subfree import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**os.environ, "SUBFREE_PURE": "1"}, check=True)
    assert out.stdout.strip() == "python"


@given(graphs(min_n=3, max_n=10), st.integers(3, 5), seeds)
def test_ck(g, k, seed):
    ip, ix = g.csr
    per_attempt(lambda kb, a: kb.ck_attempts(ip, ix, g.n, k, seed, a, 1),
                lambda a: simulate_ck_attempt(g, k, seed, a))


@given(digraphs(min_n=3, max_n=9), st.integers(3, 4), seeds)
def test_directed_ck(g, k, seed):
    ip, ix = g.in_csr
    per_attempt(lambda kb, a: kb.dck_attempts(ip, ix, g.n, k, seed, a, 1),
                lambda a: simulate_ck_attempt(g, k, seed, a))


@given(graphs(min_n=2, max_n=10), st.sampled_from(["P3", "S4", "T:0,1,1", "T:0,0,1,1", "P2"]), seeds)
def test_tree(g, name, seed):
    t = TreePattern.from_pattern(pattern_from_name(name))
    ip, ix = g.csr
    per_attempt(lambda kb, a: kb.tree_attempts(ip, ix, g.n, t.k, t.child_mask, t.depth, seed, a, 1),
                lambda a: simulate_tree_attempt(g, t, seed, a))


@given(digraphs(min_n=2, max_n=9), st.sampled_from(["DT:0", "DT:0,0", "DT:0,1"]), seeds)
def test_directed_tree(g, name, seed):
    t = TreePattern.from_pattern(pattern_from_name(name))
    ip, ix = g.in_csr
    per_attempt(lambda kb, a: kb.tree_attempts(ip, ix, g.n, t.k, t.child_mask, t.depth, seed, a, 1),
                lambda a: simulate_tree_attempt(g, t, seed, a))


@given(digraphs(min_n=4, max_n=9), seeds)
def test_diamond(g, seed):
    ip, ix = g.in_csr
    per_attempt(lambda kb, a: kb.diamond_attempts(ip, ix, g.n, seed, a, 1),
                lambda a: simulate_diamond_attempt(g, seed, a))


@settings(max_examples=25)
@given(graphs(min_n=3, max_n=9, max_p=0.8), st.sampled_from(["K3", "C4", "diamond", "K4", "T:0,1,1"]), seeds)
def test_checkh(g, name, seed):
    plan = build_plan(HMember.of(pattern_from_name(name)).recipe)
    ip, ix = g.csr
    per_attempt(lambda kb, a: kb.checkh_attempts(ip, ix, g.n, plan, seed, a, 1),
                lambda a: simulate_checkh_attempt(g, plan, seed, a))


def test_batched_call_returns_first_reject():
    g = pattern_from_name("K3").graph
    ip, ix = g.csr
    for kb in BACKENDS:
        hits = [a for a in range(200) if kb.ck_attempts(ip, ix, 3, 3, 9, a, 1) >= 0]
        assert kb.ck_attempts(ip, ix, 3, 3, 9, 0, 200) == hits[0]
        assert kb.ck_attempts(ip, ix, 3, 3, 9, hits[0] + 1, 200) == hits[1]
