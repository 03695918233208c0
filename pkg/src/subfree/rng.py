"""Counter-based per-node randomness.

Every random choice a node makes is ``draw(node_seed(seed, node, attempt), i)``
for a small counter ``i``. The same values come out of the scalar functions
(used by node programs), the numpy versions (pure-Python kernels) and the
compiled kernels, which is what lets the three execution paths agree bit for
bit. Bounded draws reduce modulo the bound; the bias is below ``bound / 2**64``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_NODE_MULT = 0xD6E8FEB86659FD93
_ATTEMPT_MULT = 0xA0761D6478BD642F


def mix64(x: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def node_seed(global_seed: int, node: int, attempt: int) -> int:
    h = mix64(global_seed)
    h = mix64(h ^ ((node * _NODE_MULT) & MASK64))
    return mix64((h + attempt * _ATTEMPT_MULT) & MASK64)


derive_node_seed = node_seed


def draw(seed: int, counter: int) -> int:
    """``counter``-th output of the splitmix64 stream started at ``seed``."""
    return mix64((seed + (counter + 1) * GOLDEN) & MASK64)


def trial_seed(seed: int, trial: int) -> int:
    """Global seed used by trial ``trial`` of an experiment seeded with ``seed``."""
    return mix64((mix64(seed ^ 0x5EED) + trial * GOLDEN) & MASK64)


class NodeRandom:
    """A node's private stream for one attempt."""

    __slots__ = ("seed",)

    def __init__(self, seed: int):
        self.seed = seed

    def draw(self, counter: int) -> int:
        return draw(self.seed, counter)

    def below(self, counter: int, bound: int) -> int:
        return draw(self.seed, counter) % bound


# ------------------------------------------------------------ numpy versions

def _u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def mix64_np(x) -> np.ndarray:
    x = _u64(x).copy()
    with np.errstate(over="ignore"):
        x ^= x >> np.uint64(30)
        x *= np.uint64(_M1)
        x ^= x >> np.uint64(27)
        x *= np.uint64(_M2)
        x ^= x >> np.uint64(31)
    return x


def node_seed_np(global_seed: int, nodes, attempt) -> np.ndarray:
    """Vectorised :func:`node_seed`; ``nodes`` and ``attempt`` broadcast."""
    h = np.uint64(mix64(global_seed))
    nodes = _u64(nodes)
    with np.errstate(over="ignore"):
        h = mix64_np(h ^ (nodes * np.uint64(_NODE_MULT)))
        return mix64_np(h + _u64(attempt) * np.uint64(_ATTEMPT_MULT))


def draw_np(seeds, counters) -> np.ndarray:
    with np.errstate(over="ignore"):
        return mix64_np(_u64(seeds) + (_u64(counters) + np.uint64(1)) * np.uint64(GOLDEN))
