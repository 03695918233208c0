"""Outer repetition loop shared by the testers.

Two engines produce the same decisions. ``sim`` executes every attempt as a
full round-by-round protocol run. ``fast`` asks an attempt kernel for the
first rejecting attempt and then replays only that attempt in the simulator
to recover the witness; a replay that does not reject is an internal error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .sim import SimError, Transcript

ENGINES = ("fast", "sim")


@dataclass
class SearchResult:
    attempt: int
    transcript: Transcript | None
    rounds: int
    max_bits: int
    attempts_run: int


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0 < eps <= 1) or math.isnan(eps):
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return eps


def check_engine(engine: str) -> str:
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    return engine


def first_reject(total: int, rounds_per_attempt: int, width: int,
                 kernel: Callable[[int, int], int], simulate: Callable[[int], Transcript],
                 engine: str = "fast") -> SearchResult:
    """Run attempts ``0..total-1`` until one rejects.

    ``width`` is the widest message the protocol can send; the fast engine
    reports it as ``max_bits`` since it does not materialise messages.
    """
    check_engine(engine)
    if engine == "sim":
        rounds = max_bits = 0
        for a in range(total):
            t = simulate(a)
            rounds += t.rounds
            max_bits = max(max_bits, t.max_bits)
            if t.reject:
                return SearchResult(a, t, rounds, max_bits, a + 1)
        return SearchResult(-1, None, rounds, max_bits, total)
    a = int(kernel(0, total))
    if a < 0:
        return SearchResult(-1, None, total * rounds_per_attempt, width, total)
    t = simulate(a)
    if not t.reject:
        raise SimError(f"attempt {a}: kernel rejected but the simulator accepted")
    return SearchResult(a, t, a * rounds_per_attempt + t.rounds, max(width, t.max_bits), a + 1)
