"""Pure-numpy attempt kernels.

Each ``*_attempts`` function runs attempts ``start .. start+count-1`` of a
tester and returns the index of the first attempt in which some node rejects,
or ``-1``. Semantics match the node programs exactly; the compiled module
``_kernels`` implements the same functions with explicit loops.

Per-node random values: ``color = draw(seed_v, 0) % k``; the weight of the
``j``-th (sorted) neighbor slot is ``draw(seed_v, 1 + j) % n**4``; in the
directed model the node weight is ``draw(seed_v, 1) % n**4``.
"""
from __future__ import annotations

import numpy as np

from .rng import draw_np, node_seed_np

INF = np.uint64(0xFFFFFFFFFFFFFFFF)


def _slot_arrays(indptr: np.ndarray):
    n = len(indptr) - 1
    deg = np.diff(indptr)
    src = np.repeat(np.arange(n, dtype=np.int64), deg)
    slot = np.arange(int(indptr[-1]), dtype=np.int64) - indptr[src]
    return src, slot, deg


def _colors(seeds: np.ndarray, k: int) -> np.ndarray:
    return (draw_np(seeds, 0) % np.uint64(k)).astype(np.int64)


def _slot_weights(seeds, src, slot, n4: int) -> np.ndarray:
    return draw_np(seeds[src], 1 + slot) % np.uint64(n4)


def _first_min(dst: np.ndarray, keys: list[np.ndarray]):
    """For each distinct ``dst``, the position of its lexicographically
    smallest key (``keys`` ordered most significant first)."""
    order = np.lexsort(tuple(reversed(keys)) + (dst,))
    d = dst[order]
    first = np.ones(len(d), dtype=bool)
    first[1:] = d[1:] != d[:-1]
    return d[first], order[first]


def _less(a_w, a_r, b_w, b_r):
    return (a_w < b_w) | ((a_w == b_w) & (a_r < b_r))


def _bfs_rounds(src, dst, k, pos, active, wgt, root, tag=None):
    """Color-coded BFS over positions ``0..k-1``; returns a bool array of
    nodes that closed (position 0 receivers seeing their own root)."""
    n = len(pos)
    closed = np.zeros(n, dtype=bool)
    for r in range(k):
        nxt = (r + 1) % k
        m = (pos[src] == r) & active[src] & (wgt[src] != INF) & (pos[dst] == nxt) & active[dst]
        if tag is not None:
            m &= tag[src] == tag[dst]
        if not m.any():
            continue
        s, d = src[m], dst[m]
        if r == k - 1:
            closed[d[root[s] == d]] = True
        ud, at = _first_min(d, [wgt[s], root[s]])
        bw, br = wgt[s[at]], root[s[at]]
        better = _less(bw, br, wgt[ud], root[ud])
        wgt[ud[better]] = bw[better]
        root[ud[better]] = br[better]
    return closed


# ------------------------------------------------------------------ cycles

def ck_attempts(indptr, indices, n: int, k: int, seed: int, start: int, count: int,
                aborted=None) -> int:
    src, slot, deg = _slot_arrays(indptr)
    dst = indices.astype(np.int64)
    nodes = np.arange(n, dtype=np.int64)
    n4 = n ** 4
    active = np.ones(n, dtype=bool) if aborted is None else ~np.asarray(aborted, dtype=bool)
    has = deg > 0
    for a in range(start, start + count):
        seeds = node_seed_np(seed, nodes, a)
        color = _colors(seeds, k)
        w = _slot_weights(seeds, src, slot, n4)
        wgt = np.full(n, INF, dtype=np.uint64)
        if has.any():
            wgt[has] = np.minimum.reduceat(w, indptr[:-1][has])
        root = nodes.copy()
        if _bfs_rounds(src, dst, k, color, active, wgt, root).any():
            return a
    return -1


def dck_attempts(in_indptr, in_indices, n: int, k: int, seed: int, start: int, count: int) -> int:
    """Directed C_k: messages travel tail -> head; node weights."""
    heads, _, _ = _slot_arrays(in_indptr)
    tails = in_indices.astype(np.int64)
    nodes = np.arange(n, dtype=np.int64)
    n4 = n ** 4
    active = np.ones(n, dtype=bool)
    for a in range(start, start + count):
        seeds = node_seed_np(seed, nodes, a)
        color = _colors(seeds, k)
        wgt = draw_np(seeds, 1) % np.uint64(n4)
        root = nodes.copy()
        if _bfs_rounds(tails, heads, k, color, active, wgt, root).any():
            return a
    return -1


# ------------------------------------------------------------------- trees

def tree_closed(indptr, indices, color: np.ndarray, child_mask: np.ndarray, depth: int,
                active=None, tag=None, member_mask: int | None = None) -> np.ndarray:
    """CheckTree on a fixed coloring; ``indptr``/``indices`` list, for every
    node, the neighbors it hears from. Returns the final closed flags."""
    n = len(color)
    recv, _, _ = _slot_arrays(indptr)
    snd = indices.astype(np.int64)
    if member_mask is None:
        part = np.ones(n, dtype=bool)
    else:
        part = ((member_mask >> color) & 1).astype(bool)
    if active is None:
        active = np.ones(n, dtype=bool)
    missing = np.where(part, child_mask[color], 0).astype(np.int64)
    closed = part & (missing == 0)
    bit = np.left_shift(1, color).astype(np.int64)
    for _ in range(depth):
        m = closed[snd] & active[snd] & part[recv] & active[recv]
        if tag is not None:
            m &= tag[snd] == tag[recv]
        if m.any():
            heard = np.zeros(n, dtype=np.int64)
            np.bitwise_or.at(heard, recv[m], bit[snd[m]])
            missing &= ~heard
        closed = part & (missing == 0)
    return closed


def tree_attempts(indptr, indices, n: int, k: int, child_mask, depth: int, seed: int,
                  start: int, count: int) -> int:
    nodes = np.arange(n, dtype=np.int64)
    child_mask = np.asarray(child_mask, dtype=np.int64)
    for a in range(start, start + count):
        color = _colors(node_seed_np(seed, nodes, a), k)
        closed = tree_closed(indptr, indices, color, child_mask, depth)
        if (closed & (color == 0)).any():
            return a
    return -1


# ----------------------------------------------------------------- diamond

def diamond_attempts(in_indptr, in_indices, n: int, seed: int, start: int, count: int) -> int:
    heads, _, _ = _slot_arrays(in_indptr)
    tails = in_indices.astype(np.int64)
    nodes = np.arange(n, dtype=np.int64)
    n4 = n ** 4
    for a in range(start, start + count):
        seeds = node_seed_np(seed, nodes, a)
        color = _colors(seeds, 4)
        w = draw_np(seeds, 1) % np.uint64(n4)
        # round 1: color-0 tails reach color-1/2 heads
        m = (color[tails] == 0) & ((color[heads] == 1) | (color[heads] == 2))
        best = np.full(n, -1, dtype=np.int64)
        if m.any():
            ud, at = _first_min(heads[m], [w[tails[m]], tails[m]])
            best[ud] = tails[m][at]
        # round 2: color-1/2 tails with a choice reach color-3 heads
        m = ((color[tails] == 1) | (color[tails] == 2)) & (best[tails] >= 0) & (color[heads] == 3)
        if not m.any():
            continue
        t, h = tails[m], heads[m]
        key1 = np.where(color[t] == 1, best[t], -1)
        key2 = np.where(color[t] == 2, best[t], -1)
        pairs1 = set(zip(h[key1 >= 0].tolist(), key1[key1 >= 0].tolist()))
        pairs2 = set(zip(h[key2 >= 0].tolist(), key2[key2 >= 0].tolist()))
        if pairs1 & pairs2:
            return a
    return -1


# ------------------------------------------------------------------ CheckH

def checkh_attempt_state(indptr, indices, n: int, plan, seed: int, a: int):
    """One CheckH attempt; returns the per-node arrays the final step reads."""
    k = plan.k
    src, slot, deg = _slot_arrays(indptr)
    dst = indices.astype(np.int64)
    nodes = np.arange(n, dtype=np.int64)
    seeds = node_seed_np(seed, nodes, a)
    color = _colors(seeds, k)
    w = _slot_weights(seeds, src, slot, n ** 4)
    # selection at color-0 nodes among color-1 neighbors
    fw = np.full(n, INF, dtype=np.uint64)
    u0 = np.full(n, -1, dtype=np.int64)
    u1 = np.full(n, -1, dtype=np.int64)
    m = (color[src] == 0) & (color[dst] == 1)
    if m.any():
        ud, at = _first_min(src[m], [w[m], dst[m]])
        fw[ud] = w[m][at]
        u0[ud] = ud
        u1[ud] = dst[m][at]
    # flood
    for _ in range(plan.diam):
        m = u0[src] >= 0
        if not m.any():
            break
        s, d = src[m], dst[m]
        ud, at = _first_min(d, [fw[s], u0[s], u1[s]])
        bs = s[at]
        bw, b0, b1 = fw[bs], u0[bs], u1[bs]
        better = (u0[ud] < 0) | (bw < fw[ud]) | ((bw == fw[ud]) & ((b0 < u0[ud]) | ((b0 == u0[ud]) & (b1 < u1[ud]))))
        t = ud[better]
        fw[t], u0[t], u1[t] = bw[better], b0[better], b1[better]
    abort = u0 < 0
    abort |= (color == 0) & (u0 != nodes)
    abort |= (color == 1) & (u1 != nodes)
    nb = [set() for _ in range(n)]
    for s_, d_ in zip(src.tolist(), dst.tolist()):
        nb[s_].add(d_)
    need0 = ((plan.e0_mask >> color) & 1).astype(bool)
    need1 = ((plan.e1_mask >> color) & 1).astype(bool)
    for v in range(n):
        if abort[v]:
            continue
        if need0[v] and u0[v] not in nb[v]:
            abort[v] = True
        elif need1[v] and u1[v] not in nb[v]:
            abort[v] = True
    tag = u0
    for t in range(len(plan.tree_root)):
        closed = tree_closed(indptr, indices, color, plan.tree_children[t], plan.tree_depth[t],
                             active=~abort, tag=tag, member_mask=int(plan.tree_members[t]))
        abort |= (color == plan.tree_root[t]) & ~closed
    for i in range(len(plan.cyc_len)):
        pos = plan.cyc_pos[i][color]
        wgt = np.full(n, INF, dtype=np.uint64)
        root = np.full(n, -1, dtype=np.int64)
        origin = (pos == 0) & ~abort
        wgt[origin] = fw[origin]
        root[origin] = nodes[origin]
        res = _bfs_rounds(src, dst, int(plan.cyc_len[i]), pos, ~abort, wgt, root, tag=tag)
        abort |= (color == plan.cyc_owner[i]) & ~res
    return color, u0, u1, abort


def checkh_attempts(indptr, indices, n: int, plan, seed: int, start: int, count: int) -> int:
    for a in range(start, start + count):
        color, u0, u1, abort = checkh_attempt_state(indptr, indices, n, plan, seed, a)
        cand = np.nonzero((color == 0) & ~abort)[0]
        for v in cand:
            z = u1[v]
            if not abort[z] and u0[z] == v:
                return a
    return -1
