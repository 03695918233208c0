# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled attempt kernels; loop-for-loop twins of ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef uint64_t NODE_MULT = 0xD6E8FEB86659FD93ULL
cdef uint64_t ATTEMPT_MULT = 0xA0761D6478BD642FULL
cdef uint64_t INF = 0xFFFFFFFFFFFFFFFFULL
MASK64 = (1 << 64) - 1


cdef inline uint64_t mix64(uint64_t x) nogil:
    x = (x ^ (x >> 30)) * M1
    x = (x ^ (x >> 27)) * M2
    return x ^ (x >> 31)


cdef inline uint64_t node_seed(uint64_t g, uint64_t node, uint64_t attempt) nogil:
    cdef uint64_t h = mix64(g)
    h = mix64(h ^ (node * NODE_MULT))
    return mix64(h + attempt * ATTEMPT_MULT)


cdef inline uint64_t draw(uint64_t seed, uint64_t counter) nogil:
    return mix64(seed + (counter + 1) * GOLDEN)


cdef inline bint key_less(uint64_t aw, int64_t ar, uint64_t bw, int64_t br) nogil:
    return aw < bw or (aw == bw and ar < br)


cdef uint64_t pow4(int n):
    cdef uint64_t x = <uint64_t>n
    return x * x * x * x


cdef bint bfs_rounds(const int64_t[:] indptr, const int32_t[:] indices, int n, int k,
                     int64_t[:] pos, uint8_t[:] active, uint64_t[:] wgt, int64_t[:] root,
                     int64_t[:] tag, bint use_tag, uint8_t[:] closed) nogil:
    """Color-coded BFS over positions 0..k-1; marks closers, returns whether any."""
    cdef int r, nxt, v, u
    cdef int64_t j, br
    cdef uint64_t bw
    cdef bint any_closed = False
    for r in range(k):
        nxt = (r + 1) % k
        for v in range(n):
            if pos[v] != nxt or not active[v]:
                continue
            bw = INF
            br = -1
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                if pos[u] != r or not active[u] or wgt[u] == INF:
                    continue
                if use_tag and tag[u] != tag[v]:
                    continue
                if r == k - 1 and root[u] == v:
                    closed[v] = 1
                    any_closed = True
                if br < 0 or key_less(wgt[u], root[u], bw, br):
                    bw = wgt[u]
                    br = root[u]
            if br >= 0 and key_less(bw, br, wgt[v], root[v]):
                wgt[v] = bw
                root[v] = br
    return any_closed


def ck_attempts(const int64_t[:] indptr, const int32_t[:] indices, int n, int k, seed,
                long start, long count, aborted=None):
    cdef uint64_t gs = seed & MASK64
    cdef uint64_t n4 = pow4(n)
    cdef uint64_t s, w
    cdef int64_t[:] color = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] root = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] wgt = np.zeros(n, dtype=np.uint64)
    cdef uint8_t[:] closed = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] active = np.ones(n, dtype=np.uint8)
    cdef int64_t[:] notag = np.zeros(1, dtype=np.int64)
    cdef long a
    cdef int v
    cdef int64_t j
    if aborted is not None:
        active = (~np.asarray(aborted, dtype=bool)).astype(np.uint8)
    for a in range(start, start + count):
        for v in range(n):
            s = node_seed(gs, v, a)
            color[v] = <int64_t>(draw(s, 0) % <uint64_t>k)
            wgt[v] = INF
            for j in range(indptr[v], indptr[v + 1]):
                w = draw(s, <uint64_t>(1 + j - indptr[v])) % n4
                if w < wgt[v]:
                    wgt[v] = w
            root[v] = v
        if bfs_rounds(indptr, indices, n, k, color, active, wgt, root, notag, False, closed):
            return a
    return -1


def dck_attempts(const int64_t[:] in_indptr, const int32_t[:] in_indices, int n, int k, seed,
                 long start, long count):
    cdef uint64_t gs = seed & MASK64
    cdef uint64_t n4 = pow4(n)
    cdef uint64_t s
    cdef int64_t[:] color = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] root = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] wgt = np.zeros(n, dtype=np.uint64)
    cdef uint8_t[:] closed = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] active = np.ones(n, dtype=np.uint8)
    cdef int64_t[:] notag = np.zeros(1, dtype=np.int64)
    cdef long a
    cdef int v
    for a in range(start, start + count):
        for v in range(n):
            s = node_seed(gs, v, a)
            color[v] = <int64_t>(draw(s, 0) % <uint64_t>k)
            wgt[v] = draw(s, 1) % n4
            root[v] = v
        if bfs_rounds(in_indptr, in_indices, n, k, color, active, wgt, root, notag, False, closed):
            return a
    return -1


cdef void tree_rounds(const int64_t[:] indptr, const int32_t[:] indices, int n,
                      int64_t[:] color, const int64_t[:] child_mask, int depth,
                      uint8_t[:] part, uint8_t[:] active, int64_t[:] tag, bint use_tag,
                      int64_t[:] missing, uint8_t[:] closed, uint8_t[:] snap) nogil:
    cdef int r, v, u
    cdef int64_t j
    for v in range(n):
        missing[v] = child_mask[color[v]] if part[v] else 0
        closed[v] = part[v] and missing[v] == 0
    for r in range(depth):
        for v in range(n):
            snap[v] = closed[v]
        for v in range(n):
            if not part[v] or not active[v]:
                continue
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                if snap[u] and active[u] and (not use_tag or tag[u] == tag[v]):
                    missing[v] &= ~(<int64_t>1 << color[u])
        for v in range(n):
            closed[v] = part[v] and missing[v] == 0


def tree_attempts(const int64_t[:] indptr, const int32_t[:] indices, int n, int k,
                  child_mask, int depth, seed, long start, long count):
    cdef uint64_t gs = seed & MASK64
    cdef const int64_t[:] cm = np.ascontiguousarray(child_mask, dtype=np.int64)
    cdef int64_t[:] color = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] missing = np.zeros(n, dtype=np.int64)
    cdef uint8_t[:] closed = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] snap = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] part = np.ones(n, dtype=np.uint8)
    cdef uint8_t[:] active = np.ones(n, dtype=np.uint8)
    cdef int64_t[:] notag = np.zeros(1, dtype=np.int64)
    cdef long a
    cdef int v
    for a in range(start, start + count):
        for v in range(n):
            color[v] = <int64_t>(draw(node_seed(gs, v, a), 0) % <uint64_t>k)
        tree_rounds(indptr, indices, n, color, cm, depth, part, active, notag, False,
                    missing, closed, snap)
        for v in range(n):
            if closed[v] and color[v] == 0:
                return a
    return -1


def diamond_attempts(const int64_t[:] in_indptr, const int32_t[:] in_indices, int n, seed,
                     long start, long count):
    cdef uint64_t gs = seed & MASK64
    cdef uint64_t n4 = pow4(n)
    cdef uint64_t s, bw
    cdef int64_t[:] color = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] w = np.zeros(n, dtype=np.uint64)
    cdef int64_t[:] best = np.zeros(n, dtype=np.int64)
    cdef long a
    cdef int v, u, x
    cdef int64_t j, jj
    for a in range(start, start + count):
        for v in range(n):
            s = node_seed(gs, v, a)
            color[v] = <int64_t>(draw(s, 0) % 4)
            w[v] = draw(s, 1) % n4
        for v in range(n):
            best[v] = -1
            if color[v] != 1 and color[v] != 2:
                continue
            for j in range(in_indptr[v], in_indptr[v + 1]):
                u = in_indices[j]
                if color[u] == 0 and (best[v] < 0 or key_less(w[u], u, w[best[v]], best[v])):
                    best[v] = u
        for v in range(n):
            if color[v] != 3:
                continue
            for j in range(in_indptr[v], in_indptr[v + 1]):
                u = in_indices[j]
                if color[u] != 1 or best[u] < 0:
                    continue
                for jj in range(in_indptr[v], in_indptr[v + 1]):
                    x = in_indices[jj]
                    if color[x] == 2 and best[x] == best[u]:
                        return a
    return -1


def checkh_attempts(const int64_t[:] indptr, const int32_t[:] indices, int n, plan, seed,
                    long start, long count):
    cdef uint64_t gs = seed & MASK64
    cdef uint64_t n4 = pow4(n)
    cdef int k = plan.k
    cdef int diam = plan.diam
    cdef int64_t e0 = plan.e0_mask
    cdef int64_t e1 = plan.e1_mask
    cdef const int64_t[:] t_root = np.ascontiguousarray(plan.tree_root, dtype=np.int64)
    cdef const int64_t[:] t_depth = np.ascontiguousarray(plan.tree_depth, dtype=np.int64)
    cdef const int64_t[:, :] t_child = np.ascontiguousarray(plan.tree_children, dtype=np.int64).reshape(-1, k)
    cdef const int64_t[:] t_members = np.ascontiguousarray(plan.tree_members, dtype=np.int64)
    cdef const int64_t[:] c_len = np.ascontiguousarray(plan.cyc_len, dtype=np.int64)
    cdef const int64_t[:] c_owner = np.ascontiguousarray(plan.cyc_owner, dtype=np.int64)
    cdef const int64_t[:, :] c_pos = np.ascontiguousarray(plan.cyc_pos, dtype=np.int64).reshape(-1, k)
    cdef int ntrees = t_root.shape[0]
    cdef int ncyc = c_len.shape[0]
    cdef int64_t[:] color = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] fw = np.zeros(n, dtype=np.uint64)
    cdef int64_t[:] u0 = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] u1 = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] nfw = np.zeros(n, dtype=np.uint64)
    cdef int64_t[:] nu0 = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] nu1 = np.zeros(n, dtype=np.int64)
    cdef uint8_t[:] abort = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] active = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] part = np.zeros(n, dtype=np.uint8)
    cdef int64_t[:] missing = np.zeros(n, dtype=np.int64)
    cdef uint8_t[:] closed = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[:] snap = np.zeros(n, dtype=np.uint8)
    cdef int64_t[:] pos = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:] wgt = np.zeros(n, dtype=np.uint64)
    cdef int64_t[:] root = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] cm = np.zeros(k, dtype=np.int64)
    cdef long a
    cdef int v, u, r, t, i, z, x
    cdef int64_t j
    cdef uint64_t s, w, bw
    cdef int64_t b0, b1
    cdef bint found
    for a in range(start, start + count):
        for v in range(n):
            s = node_seed(gs, v, a)
            color[v] = <int64_t>(draw(s, 0) % <uint64_t>k)
        for v in range(n):
            fw[v] = INF
            u0[v] = -1
            u1[v] = -1
            if color[v] != 0:
                continue
            s = node_seed(gs, v, a)
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                if color[u] != 1:
                    continue
                w = draw(s, <uint64_t>(1 + j - indptr[v])) % n4
                if u1[v] < 0 or key_less(w, u, fw[v], u1[v]):
                    fw[v] = w
                    u1[v] = u
                    u0[v] = v
        for r in range(diam):
            for v in range(n):
                bw = fw[v]
                b0 = u0[v]
                b1 = u1[v]
                for j in range(indptr[v], indptr[v + 1]):
                    u = indices[j]
                    if u0[u] < 0:
                        continue
                    if (b0 < 0 or fw[u] < bw or (fw[u] == bw and (u0[u] < b0 or (u0[u] == b0 and u1[u] < b1)))):
                        bw = fw[u]
                        b0 = u0[u]
                        b1 = u1[u]
                nfw[v] = bw
                nu0[v] = b0
                nu1[v] = b1
            for v in range(n):
                fw[v] = nfw[v]
                u0[v] = nu0[v]
                u1[v] = nu1[v]
        for v in range(n):
            abort[v] = u0[v] < 0 or (color[v] == 0 and u0[v] != v) or (color[v] == 1 and u1[v] != v)
            if abort[v]:
                continue
            if (e0 >> color[v]) & 1:
                found = False
                for j in range(indptr[v], indptr[v + 1]):
                    if indices[j] == u0[v]:
                        found = True
                if not found:
                    abort[v] = 1
                    continue
            if (e1 >> color[v]) & 1:
                found = False
                for j in range(indptr[v], indptr[v + 1]):
                    if indices[j] == u1[v]:
                        found = True
                if not found:
                    abort[v] = 1
        for t in range(ntrees):
            for x in range(k):
                cm[x] = t_child[t, x]
            for v in range(n):
                part[v] = (t_members[t] >> color[v]) & 1
                active[v] = not abort[v]
            tree_rounds(indptr, indices, n, color, cm, <int>t_depth[t], part, active, u0, True,
                        missing, closed, snap)
            for v in range(n):
                if color[v] == t_root[t] and not closed[v]:
                    abort[v] = 1
        for i in range(ncyc):
            for v in range(n):
                pos[v] = c_pos[i, color[v]]
                active[v] = not abort[v]
                closed[v] = 0
                if pos[v] == 0 and active[v]:
                    wgt[v] = fw[v]
                    root[v] = v
                else:
                    wgt[v] = INF
                    root[v] = -1
            bfs_rounds(indptr, indices, n, <int>c_len[i], pos, active, wgt, root, u0, True, closed)
            for v in range(n):
                if color[v] == c_owner[i] and not closed[v]:
                    abort[v] = 1
        for v in range(n):
            if color[v] == 0 and not abort[v]:
                z = <int>u1[v]
                if not abort[z] and u0[z] == v:
                    return a
    return -1
