"""Brute-force reference computations. Deliberately naive; gate them to small n."""

import heapq
import math

import numpy as np


def dijkstra(g, source):
    """Single-source shortest-path distances in a :class:`SpannerGraph`."""
    dist = np.full(g.n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, int(source))]
    ptr, nbr, wt = g.ptr, g.nbr.tolist(), g.wt.tolist()
    done = np.zeros(g.n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for j in range(ptr[u], ptr[u + 1]):
            v = nbr[j]
            nd = d + wt[j]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def oracle_shortest_path(g, u, v):
    d = dijkstra(g, u)[v]
    if not math.isfinite(d):
        raise RuntimeError(f"vertex {v} unreachable from {u}")
    return float(d)


def floyd_warshall(g):
    """All-pairs distances by the O(n^3) matrix recurrence."""
    d = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(d, 0.0)
    d[g.eu, g.ev] = g.ew
    d[g.ev, g.eu] = g.ew
    for k in range(g.n):
        d = np.minimum(d, d[:, k][:, None] + d[k, :][None, :])
    return d


def root_path(t, v):
    out = [v]
    while t.parent[out[-1]] >= 0:
        out.append(int(t.parent[out[-1]]))
    return out[::-1]


def naive_tree_distance(t, u, v):
    """Distance via explicit root paths with the shared prefix removed."""
    pu, pv = root_path(t, u), root_path(t, v)
    i = 0
    while i < min(len(pu), len(pv)) and pu[i] == pv[i]:
        i += 1
    return float(sum(t.weight[x] for x in pu[i:]) + sum(t.weight[x] for x in pv[i:]))


def naive_lca(t, u, v):
    pu, pv = root_path(t, u), root_path(t, v)
    i = 0
    while i < min(len(pu), len(pv)) and pu[i] == pv[i]:
        i += 1
    return pu[i - 1]


def naive_is_ancestor(t, a, b):
    while b >= 0:
        if b == a:
            return True
        b = int(t.parent[b])
    return False


def naive_tree_path(t, u, v):
    pu, pv = root_path(t, u), root_path(t, v)
    i = 0
    while i < min(len(pu), len(pv)) and pu[i] == pv[i]:
        i += 1
    return pu[i:][::-1] + [pu[i - 1]] + pv[i:]


def oracle_mst_weight(m):
    """Prim's algorithm on the complete metric graph."""
    n = m.n
    if n < 2:
        return 0.0
    d = m.dist
    best = d[0].copy()
    used = np.zeros(n, dtype=bool)
    used[0] = True
    best[0] = np.inf
    total = []
    for _ in range(n - 1):
        j = int(np.argmin(np.where(used, np.inf, best)))
        total.append(best[j])
        used[j] = True
        best = np.minimum(best, d[j])
    return float(math.fsum(total))


def kruskal_mst_weight(m):
    """Kruskal with union-find; the second, independent MST route."""
    n = m.n
    if n < 2:
        return 0.0
    iu, iv = np.triu_indices(n, 1)
    w = m.dist[iu, iv]
    order = np.argsort(w, kind="stable")
    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    picked = []
    for e in order:
        a, b = find(int(iu[e])), find(int(iv[e]))
        if a != b:
            uf[a] = b
            picked.append(w[e])
            if len(picked) == n - 1:
                break
    return float(math.fsum(picked))


def components_after_removal(t, verts, removed):
    """Sizes of the components of the subtree ``verts`` once ``removed`` is deleted."""
    keep = set(int(v) for v in verts) - set(int(r) for r in removed)
    seen = set()
    sizes = []
    adj = {v: [] for v in keep}
    for v in keep:
        p = int(t.parent[v])
        if p in keep:
            adj[v].append(p)
            adj[p].append(v)
    for s in keep:
        if s in seen:
            continue
        seen.add(s)
        stack = [s]
        c = 0
        while stack:
            x = stack.pop()
            c += 1
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        sizes.append(c)
    return sizes
