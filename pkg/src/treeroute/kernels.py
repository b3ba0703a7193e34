"""Hot inner loops, each with a numba-compiled and a pure numpy/python path.

Every public kernel takes ``use_numba=None`` which defers to the process-wide
switch in :mod:`treeroute._accel`. Both paths must return identical results;
``tests/test_kernels.py`` holds them to that.
"""

import numpy as np

from ._accel import USE_NUMBA, maybe_njit

# Routing case codes shared by the kernel and the object-level router.
CASE_NEIGHBOUR = 0
CASE_DOWN = 1
CASE_UP = 2
CASE_3A = 3
CASE_3B = 4
CASE_NAMES = ("0", "1", "2", "3a", "3b")

# Neighbour relation codes in the adjacency tables.
REL_PARENT = 0
REL_CHILD = 1
REL_SHORTCUT = 2

ROUTE_OK = 0
ROUTE_STUCK = 1
ROUTE_BUDGET = 2


def _pick(use_numba):
    return USE_NUMBA if use_numba is None else bool(use_numba)


# -- tree path sums ----------------------------------------------------------


def _pair_distances_loop(parent, pw, depth, us, vs, out):
    for i in range(us.shape[0]):
        a = us[i]
        b = vs[i]
        s = 0.0
        while depth[a] > depth[b]:
            s += pw[a]
            a = parent[a]
        while depth[b] > depth[a]:
            s += pw[b]
            b = parent[b]
        while a != b:
            s += pw[a]
            s += pw[b]
            a = parent[a]
            b = parent[b]
        out[i] = s
    return out


_pair_distances_py, _pair_distances_jit = maybe_njit(_pair_distances_loop)


def _pair_distances_numpy(parent, pw, depth, us, vs):
    a = us.copy()
    b = vs.copy()
    acc = np.zeros(a.shape[0])
    # Same per-pair summation order as the loop kernel, so both agree exactly.
    while True:
        m = depth[a] > depth[b]
        if not m.any():
            break
        acc[m] += pw[a[m]]
        a[m] = parent[a[m]]
    while True:
        m = depth[b] > depth[a]
        if not m.any():
            break
        acc[m] += pw[b[m]]
        b[m] = parent[b[m]]
    while True:
        m = a != b
        if not m.any():
            break
        acc[m] += pw[a[m]]
        acc[m] += pw[b[m]]
        a[m] = parent[a[m]]
        b[m] = parent[b[m]]
    return acc


def pair_distances(parent, pw, depth, us, vs, use_numba=None):
    """Tree-path weight for each pair ``(us[i], vs[i])``, by summing edges."""
    us = np.ascontiguousarray(us, dtype=np.int64)
    vs = np.ascontiguousarray(vs, dtype=np.int64)
    if _pick(use_numba):
        out = np.empty(us.shape[0])
        return _pair_distances_jit(parent, pw, depth, us, vs, out)
    return _pair_distances_numpy(parent, pw, depth, us, vs)


# -- local routing -----------------------------------------------------------


def _route_many_loop(low, rank, ptr, nbr, wt, rel, src, dst, budget,
                     hop_count, weight, status, paths, cases):
    for i in range(src.shape[0]):
        u = src[i]
        v = dst[i]
        lv = low[v]
        rv = rank[v]
        paths[i, 0] = u
        h = 0
        s = 0.0
        st = ROUTE_OK
        while u != v:
            if h >= budget:
                st = ROUTE_BUDGET
                break
            lu = low[u]
            ru = rank[u]
            best = -1
            case = -1
            for j in range(ptr[u], ptr[u + 1]):
                if nbr[j] == v:
                    best = j
                    case = CASE_NEIGHBOUR
                    break
            if best < 0:
                if lu <= rv and rv <= ru:
                    # deepest neighbour that is an ancestor of v
                    case = CASE_DOWN
                    for j in range(ptr[u], ptr[u + 1]):
                        w = nbr[j]
                        if low[w] <= rv and rv <= rank[w]:
                            if best < 0 or rank[w] < rank[nbr[best]]:
                                best = j
                elif lv <= ru and ru <= rv:
                    # highest neighbour between u and v
                    case = CASE_UP
                    for j in range(ptr[u], ptr[u + 1]):
                        w = nbr[j]
                        rw = rank[w]
                        if low[w] <= ru and ru <= rw and lv <= rw and rw <= rv:
                            if best < 0 or rw > rank[nbr[best]]:
                                best = j
                else:
                    case = CASE_3B
                    for j in range(ptr[u], ptr[u + 1]):
                        w = nbr[j]
                        lw = low[w]
                        rw = rank[w]
                        if lw <= rv and rv <= rw and not (lw <= ru and ru <= rw):
                            if best < 0 or rw < rank[nbr[best]]:
                                best = j
                    if best < 0:
                        case = CASE_3A
                        for j in range(ptr[u], ptr[u + 1]):
                            w = nbr[j]
                            lw = low[w]
                            rw = rank[w]
                            if lw <= ru and ru <= rw and not (lw <= rv and rv <= rw):
                                if best < 0 or rw > rank[nbr[best]]:
                                    best = j
                        if best < 0:
                            for j in range(ptr[u], ptr[u + 1]):
                                if rel[j] == REL_PARENT:
                                    best = j
                                    break
            if best < 0:
                st = ROUTE_STUCK
                break
            cases[i, h] = case
            s += wt[best]
            u = nbr[best]
            h += 1
            paths[i, h] = u
        hop_count[i] = h
        weight[i] = s
        status[i] = st
    return status


_route_many_py, _route_many_jit = maybe_njit(_route_many_loop)


def route_many(low, rank, ptr, nbr, wt, rel, src, dst, budget, use_numba=None):
    """Route every ``src[i] -> dst[i]`` pair with the memoryless local rule.

    Returns ``(hops, weight, status, paths, cases)``; ``paths[i, :hops[i]+1]``
    is the visited vertex sequence and ``cases[i, :hops[i]]`` the case codes.
    """
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    m = src.shape[0]
    budget = int(budget)
    hops = np.zeros(m, dtype=np.int64)
    weight = np.zeros(m)
    status = np.zeros(m, dtype=np.int64)
    paths = np.full((m, budget + 1), -1, dtype=np.int64)
    cases = np.full((m, max(budget, 1)), -1, dtype=np.int64)
    fn = _route_many_jit if _pick(use_numba) else _route_many_py
    fn(low, rank, ptr, nbr, wt, rel, src, dst, budget, hops, weight, status, paths, cases)
    return hops, weight, status, paths, cases


# -- greedy nets -------------------------------------------------------------


def _greedy_net_loop(dist, cand, radius, eps, keep):
    kept = np.empty(cand.shape[0], dtype=np.int64)
    nk = 0
    thr = radius * (1.0 + eps)
    for i in range(cand.shape[0]):
        c = cand[i]
        ok = True
        for j in range(nk):
            if dist[c, kept[j]] <= thr:
                ok = False
                break
        if ok:
            kept[nk] = c
            nk += 1
            keep[i] = True
    return keep


_greedy_net_py, _greedy_net_jit = maybe_njit(_greedy_net_loop)


def greedy_net(dist, cand, radius, eps=1e-12, use_numba=None):
    """Scan ``cand`` in order, keeping points farther than ``radius`` from all kept.

    Distances within ``radius * (1 + eps)`` count as covered, so float noise
    never produces a packing violation at exactly ``radius``.
    """
    cand = np.ascontiguousarray(cand, dtype=np.int64)
    keep = np.zeros(cand.shape[0], dtype=np.bool_)
    if _pick(use_numba):
        _greedy_net_jit(dist, cand, float(radius), float(eps), keep)
        return cand[keep]
    thr = radius * (1.0 + eps)
    kept = []
    for i, c in enumerate(cand):
        if not kept or np.all(dist[c, kept] > thr):
            kept.append(c)
            keep[i] = True
    return cand[keep]
