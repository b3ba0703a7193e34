"""Property checks shared by the harness and the test suite.

Each check returns the number of violations found (0 means it holds).
"""

import math

import numpy as np

from .doubling import EPS, cross_edge_target_interval, first_joined_level
from .labels import label_bits_width
from .oracles import dijkstra

REL_TOL = 1e-9


def close(a, b, rel=REL_TOL):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-300)


# -- tree spanner -----------------------------------------------------------------


def spanner_exactness(t, g, sources, targets_per_source=None):
    """Shortest-path distance in ``g`` equals tree distance from each source."""
    bad = 0
    for s in sources:
        d = dijkstra(g, int(s))
        vs = np.arange(t.n) if targets_per_source is None else targets_per_source[s]
        vs = np.asarray(vs, dtype=np.int64)
        td = t.distances(np.full(vs.shape[0], s), vs)
        for got, want in zip(d[vs], td):
            if not close(got, want):
                bad += 1
    return bad


def spanner_edges_valid(t, g):
    """Tree edges present, every edge weighted by tree distance, no loops."""
    bad = int(np.count_nonzero(g.eu == g.ev))
    td = t.distances(g.eu, g.ev)
    bad += sum(not close(a, b) for a, b in zip(g.ew, td))
    for v in np.flatnonzero(t.parent >= 0):
        if not g.has_edge(int(v), int(t.parent[v])):
            bad += 1
    return bad


def cut_set_sizes(dec):
    """Non-base canonical subtrees with more than k+1 cut vertices."""
    return sum(1 for s in dec if not s.base and s.cut.shape[0] > dec.k + 1)


def component_shrinkage(dec):
    """Child canonical subtrees larger than ``2 n' / k``."""
    bad = 0
    for s in dec:
        for c in s.children:
            if dec.subtrees[c].size * dec.k > 2 * s.size:
                bad += 1
    return bad


def ownership(dec, n):
    counts = np.zeros(n, dtype=np.int64)
    for s in dec:
        np.add.at(counts, s.cut, 1)
    return int(np.count_nonzero(counts != 1))


def sequence_nesting(dec):
    bad = 0
    for s in dec:
        for j, c in enumerate(s.children, start=1):
            if dec.subtrees[c].sequence != s.sequence + (j,):
                bad += 1
    return bad


def exit_edges(t, dec):
    """Non-root canonical subtrees with >2 boundary tree edges or a bad boundary vertex."""
    bad = 0
    inside = np.zeros(t.n, dtype=bool)
    for s in dec.subtrees[1:]:
        inside[:] = False
        inside[s.vertices] = True
        crossing = 0
        ok = True
        for v in s.vertices:
            v = int(v)
            nbrs = list(t.children(v))
            if t.parent[v] >= 0:
                nbrs.append(t.parent[v])
            for w in nbrs:
                if not inside[w]:
                    crossing += 1
                    if v not in (s.root, s.leftmost):
                        ok = False
        if crossing > 2 or not ok:
            bad += 1
    return bad


def degree_bound(t, g, k):
    return int(g.max_degree() > t.max_degree + k)


def base_case_degree_bound(t, g, k):
    """Degree bound that accounts for complete graphs on base-case subtrees."""
    return int(g.max_degree() > max(t.max_degree + k, 2 * k + 3))


def edge_bound(t, g, k):
    return int(g.edge_count > t.n * (k + 2))


def label_bits_bound(t, bits, k):
    cap = 2 * label_bits_width(t.n) * (t.max_degree + k + 2)
    return int(max(bits.values()) > cap)


def lightness_cap(n, k, c):
    return k * k * (math.log2(max(n, 2)) / math.log2(k) + 2) * c


def route_exactness(t, sources, dests, weights):
    td = t.distances(sources, dests)
    return sum(not close(a, b) for a, b in zip(weights, td))


def route_subsequence(t, sources, dests, batch):
    """Routes whose vertex sequence is not an in-order subsequence of the tree path."""
    bad = 0
    for i, (s, d) in enumerate(zip(sources, dests)):
        path = t.path(int(s), int(d))
        where = {x: j for j, x in enumerate(path)}
        last = -1
        for h in batch.path(i):
            j = where.get(h)
            if j is None or j <= last:
                bad += 1
                break
            last = j
    return bad


# -- net tree -----------------------------------------------------------------------


def net_packing_covering(levels, m):
    """Level ``i`` is a ``2**i``-net of level ``i-1``: packing and covering."""
    bad = 0
    for i in range(1, len(levels)):
        r = 2.0 ** i
        cur, prev = levels[i], levels[i - 1]
        if not set(cur.tolist()) <= set(prev.tolist()):
            bad += 1
        sub = m.dist[np.ix_(cur, cur)]
        np.fill_diagonal(sub, np.inf)
        bad += int(np.count_nonzero(sub <= r * (1 + EPS))) // 2
        cover = m.dist[np.ix_(prev, cur)].min(axis=1)
        bad += int(np.count_nonzero(cover > r * (1 + EPS)))
    if levels[-1].shape[0] != 1:
        bad += 1
    return bad


def parent_distances(nt):
    bad = 0
    for x in range(nt.node_count):
        p = nt.parent[x]
        if p < 0:
            continue
        i = nt.level[x]
        if nt.level[p] != i + 1 or nt.metric.d(nt.rep[x], nt.rep[p]) > 2.0 ** (i + 1) * (1 + EPS):
            bad += 1
    return bad


def cross_edges_exact(nt):
    """Cross edges equal the ``gamma * 2**i`` threshold graph on each level."""
    bad = 0
    off = 0
    for i, lv in enumerate(nt.levels):
        ids = np.arange(off, off + lv.shape[0])
        thr = nt.gamma * 2.0 ** i * (1 + EPS)
        for a_pos, a in enumerate(ids):
            want = set((off + np.flatnonzero(nt.metric.dist[lv[a_pos], lv] <= thr)).tolist()) - {int(a)}
            if want != set(nt.cross[a].tolist()):
                bad += 1
        off += lv.shape[0]
    return bad


def cross_edges_monotone(nt):
    """Every cross edge's parents are joined (equal or cross-linked)."""
    bad = 0
    for a in range(nt.node_count):
        pa = nt.parent[a]
        for b in nt.cross[a]:
            pb = nt.parent[b]
            if pa < 0 or not (pa == pb or pb in nt.cross[pa]):
                bad += 1
    return bad


def climb_distances(nt):
    """``d(p^(j), p) <= 2 * 2**j`` for every point and level."""
    bad = 0
    for p in range(nt.metric.n):
        x = p
        while x >= 0:
            j = nt.level[x]
            if nt.metric.d(p, nt.rep[x]) > 2.0 * 2.0 ** j * (1 + EPS):
                bad += 1
            x = nt.parent[x]
    return bad


def light_partition(nt):
    """Light subtrees are disjoint and cover every node up to the cut level."""
    bad = int(np.count_nonzero((nt.level <= nt.cut_level) != (nt.light_of >= 0)))
    counts = np.bincount(nt.light_of[nt.light_of >= 0], minlength=len(nt.lights))
    bad += sum(int(c != lt.nodes.shape[0]) for c, lt in zip(counts, nt.lights))
    return bad


def interval_contains_first_level(nt, ps, qs, delta=0.0):
    bad = 0
    for p, q in zip(ps, qs):
        lo, hi = cross_edge_target_interval(nt.metric.d(p, q), nt.gamma, delta, nt.top)
        i = first_joined_level(nt, int(p), int(q))
        if not lo <= i <= hi:
            bad += 1
    return bad
