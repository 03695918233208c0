"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--attempts 200] [--repeat 3]

Both backends must return the same first-reject index; the script checks that
before printing timings. Cases on free instances run every attempt; the
others stop at the first rejecting attempt.
"""
from __future__ import annotations

import argparse
import time

from subfree import kernels
from subfree.generators import make_h_free, random_graph
from subfree.graph import DiGraph, pattern_from_name
from subfree.hclass import HMember, build_plan
from subfree.trees import TreePattern


def cases(attempts: int):
    free_c5 = make_h_free(200, 600, pattern_from_name("C5"), seed=1)
    tri = make_h_free(300, 900, pattern_from_name("K3"), seed=3)
    dense = random_graph(120, 0.05, seed=2)
    tree = TreePattern.from_pattern(pattern_from_name("T:0,0,1,1"))
    plan = build_plan(HMember.of(pattern_from_name("diamond")).recipe)
    dg = DiGraph(dense.n, [(u, v) if (u + v) % 2 else (v, u) for u, v in dense.edges])
    ip, ix = free_c5.csr
    tp, tx = tri.csr
    dp, dx = dense.csr
    gp, gx = dg.in_csr
    yield "ck k=5, C5-free n=200", lambda kb: kb.ck_attempts(ip, ix, free_c5.n, 5, 1, 0, attempts)
    yield "ck k=3, triangle-free n=300", lambda kb: kb.ck_attempts(tp, tx, tri.n, 3, 1, 0, attempts)
    yield "tree k=5, G(120,0.05)", lambda kb: kb.tree_attempts(dp, dx, dense.n, tree.k, tree.child_mask,
                                                               tree.depth, 1, 0, attempts)
    yield "checkh diamond, G(120,0.05)", lambda kb: kb.checkh_attempts(dp, dx, dense.n, plan, 1, 0, attempts)
    yield "directed diamond, n=120", lambda kb: kb.diamond_attempts(gp, gx, dg.n, 1, 0, attempts)
    yield "directed C4, n=120", lambda kb: kb.dck_attempts(gp, gx, dg.n, 4, 1, 0, attempts)


def best_of(fn, repeat: int) -> tuple[float, int]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--attempts", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    names = kernels.available()
    print(f"backends: {', '.join(names)}; {args.attempts} attempts per case, best of {args.repeat}")
    print(f"{'case':32s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, run in cases(args.attempts):
        times, results = [], []
        for name in names:
            t, r = best_of(lambda: run(kernels.backend(name)), args.repeat)
            times.append(t)
            results.append(r)
        if len(set(results)) != 1:
            raise SystemExit(f"{label}: backends disagree {dict(zip(names, results))}")
        line = f"{label:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
