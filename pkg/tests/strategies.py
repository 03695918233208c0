"""Shared hypothesis strategies."""
from hypothesis import strategies as st

from subfree.graph import DiGraph, Graph


@st.composite
def graphs(draw, min_n=1, max_n=12, max_p=0.6):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def digraphs(draw, min_n=1, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    mask = draw(st.lists(st.integers(0, 3), min_size=len(pairs), max_size=len(pairs)))
    return DiGraph(n, [e for e, keep in zip(pairs, mask) if keep == 0])
