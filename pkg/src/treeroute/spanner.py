"""Recursive cut-vertex shortcutting: a 1-spanner for the metric of a weighted tree.

Each canonical subtree picks a small set of cut vertices, joins them by a
complete graph weighted with tree distances, and recurses on the forest that
remains once the cut vertices are removed. The recursion hierarchy is kept
as a :class:`CanonicalDecomposition`; the router's proofs and the tests lean
on it.
"""

from dataclasses import dataclass, field
import io
import math

import numpy as np

from .tree import UnknownVertexError

TREE = 0
SHORTCUT = 1
KIND_CODES = ("T", "S")


class SpannerGraph:
    """Tree edges plus shortcut edges, with CSR adjacency.

    ``ptr/nbr/wt/kind`` hold the adjacency; each undirected edge appears once
    per endpoint. ``eu/ev/ew/ekind`` list every edge once with ``eu < ev``.
    """

    def __init__(self, n, eu, ev, ew, ekind):
        self.n = n
        order = np.lexsort((ev, eu))
        self.eu, self.ev, self.ew, self.ekind = eu[order], ev[order], ew[order], ekind[order]
        src = np.concatenate([self.eu, self.ev])
        dst = np.concatenate([self.ev, self.eu])
        w = np.concatenate([self.ew, self.ew])
        k = np.concatenate([self.ekind, self.ekind])
        o = np.lexsort((dst, src))
        self.nbr = dst[o]
        self.wt = w[o]
        self.kind = k[o]
        self.ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.ptr[1:])

    @property
    def edge_count(self):
        return int(self.eu.shape[0])

    def degrees(self):
        return np.diff(self.ptr)

    def max_degree(self):
        return int(self.degrees().max()) if self.n else 0

    def total_weight(self):
        return float(math.fsum(self.ew))

    def neighbours(self, v):
        """``(neighbour, weight, kind)`` triples with kind ``'tree'`` or ``'shortcut'``."""
        s, e = self.ptr[v], self.ptr[v + 1]
        return [(int(u), float(w), "tree" if k == TREE else "shortcut")
                for u, w, k in zip(self.nbr[s:e], self.wt[s:e], self.kind[s:e])]

    def has_edge(self, u, v):
        s, e = self.ptr[u], self.ptr[u + 1]
        i = np.searchsorted(self.nbr[s:e], v)
        return bool(i < e - s and self.nbr[s + i] == v)

    def edge_weight(self, u, v):
        s, e = self.ptr[u], self.ptr[u + 1]
        i = int(np.searchsorted(self.nbr[s:e], v))
        if i >= e - s or self.nbr[s + i] != v:
            raise KeyError((u, v))
        return float(self.wt[s + i])


@dataclass
class CanonicalSubtree:
    index: int
    sequence: tuple
    vertices: np.ndarray  # post-order
    root: int
    leftmost: int
    cut: np.ndarray  # by post-order rank
    base: bool  # cut set is the whole subtree
    d: int
    parent: int = -1
    children: list = field(default_factory=list)

    @property
    def size(self):
        return int(self.vertices.shape[0])


class CanonicalDecomposition:
    """Every canonical subtree of one construction, plus vertex ownership.

    ``owner[v]`` is the index of the subtree whose cut set holds ``v``.
    """

    def __init__(self, k, subtrees, owner):
        self.k = k
        self.subtrees = subtrees
        self.owner = owner

    def __len__(self):
        return len(self.subtrees)

    def __iter__(self):
        return iter(self.subtrees)

    def owning(self, v):
        if not 0 <= v < self.owner.shape[0]:
            raise UnknownVertexError(v)
        return self.subtrees[self.owner[v]]

    def max_sequence_length(self):
        return max(len(s.sequence) for s in self.subtrees)


def _check_k(k):
    if int(k) != k or k < 4:
        raise ValueError(f"k must be an integer >= 4, got {k!r}")
    return int(k)


class _Scratch:
    """Per-build work arrays reused across canonical subtrees."""

    def __init__(self, t):
        self.t = t
        self.stamp = np.full(t.n, -1, dtype=np.int64)
        self.size = np.zeros(t.n, dtype=np.int64)

    def enter(self, tag, verts):
        self.stamp[verts] = tag
        self.size[verts] = 1
        parent = self.t.parent
        size = self.size
        # verts is in post-order, so each child precedes its parent
        for v in verts[:-1].tolist():
            size[parent[v]] += size[v]

    def inside(self, tag, v):
        return v >= 0 and self.stamp[v] == tag


def _first_balanced(t, scr, tag, v, d):
    m = scr.size[v]
    w = v
    while True:
        fc = t.first_child[w]
        left = scr.size[fc] if scr.inside(tag, fc) else 0
        if left <= m - d:
            return int(w)
        if not scr.inside(tag, fc):
            return None
        w = fc


def _leftmost_in(t, scr, tag, v):
    while scr.inside(tag, t.first_child[v]):
        v = t.first_child[v]
    return int(v)


def _cv(t, scr, tag, root, d):
    out = []
    stack = [root]
    while stack:
        s = stack.pop()
        b = _first_balanced(t, scr, tag, s, d)
        if b is None:
            continue
        out.append(b)
        for c in t.children(b).tolist():
            if scr.inside(tag, c):
                stack.append(c)
    return out


def _subtree_vertices(t, sub):
    verts = np.unique(np.asarray(list(sub), dtype=np.int64))
    if verts.size == 0:
        raise ValueError("empty subtree")
    for v in verts:
        t.check(int(v))
    verts = verts[np.argsort(t.rank[verts])]
    top = verts[-1]
    inside = np.zeros(t.n, dtype=bool)
    inside[verts] = True
    for v in verts[:-1]:
        if not inside[t.parent[v]]:
            raise ValueError(f"vertex set is not a connected subtree (vertex {v})")
    return verts, int(top)


def first_balanced_on_leftmost_path(t, sub, v, d):
    """First ``d``-balanced vertex on the leftmost path from ``v`` inside ``sub``.

    Sizes are taken within ``sub`` and leftmost edges are inherited from
    ``t``; a vertex whose first child is outside ``sub`` ends the path. The
    balance test compares against ``|sub|``. Returns ``None`` when no vertex
    on the path qualifies.
    """
    verts, _ = _subtree_vertices(t, sub)
    v = t.check(v)
    scr = _Scratch(t)
    scr.enter(0, verts)
    if scr.stamp[v] != 0:
        raise ValueError(f"vertex {v} is not in the subtree")
    m = verts.shape[0]
    w = v
    while True:
        fc = t.first_child[w]
        left = scr.size[fc] if scr.inside(0, fc) else 0
        if left <= m - d:
            return int(w)
        if not scr.inside(0, fc):
            return None
        w = int(fc)


def cut_vertices(t, sub, k):
    """Cut-vertex set of the connected subtree ``sub`` for parameter ``k``."""
    k = _check_k(k)
    verts, top = _subtree_vertices(t, sub)
    scr = _Scratch(t)
    scr.enter(0, verts)
    cut, _ = _cut_set(t, scr, 0, verts, top, k)
    return set(int(c) for c in cut)


def _cut_set(t, scr, tag, verts, top, k):
    m = verts.shape[0]
    # base case k >= m/2 - 1, in integers
    if 2 * k >= m - 2:
        return verts, 0
    d = -(-m // k)
    cut = set(_cv(t, scr, tag, top, d))
    cut.add(_leftmost_in(t, scr, tag, top))
    cut.add(top)
    cut = np.fromiter(cut, dtype=np.int64)
    return cut[np.argsort(t.rank[cut])], d


def build_spanner(t, k):
    """Build the 1-spanner and its canonical decomposition.

    ``k`` is fixed through the recursion; the balance threshold
    ``d = ceil(n'/k)`` is recomputed for each canonical subtree of size ``n'``.
    """
    k = _check_k(k)
    n = t.n
    scr = _Scratch(t)
    owner = np.full(n, -1, dtype=np.int64)
    in_cut = np.zeros(n, dtype=bool)
    subtrees = []
    queue = [(t.order.copy(), (), -1)]
    head = 0
    while head < len(queue):
        verts, seq, par = queue[head]
        head += 1
        idx = len(subtrees)
        top = int(verts[-1])
        scr.enter(idx, verts)
        cut, d = _cut_set(t, scr, idx, verts, top, k)
        rec = CanonicalSubtree(idx, seq, verts, top, _leftmost_in(t, scr, idx, top),
                               cut, cut.shape[0] == verts.shape[0], d, par)
        subtrees.append(rec)
        if par >= 0:
            subtrees[par].children.append(idx)
        owner[cut] = idx
        in_cut[cut] = True
        if rec.base:
            continue
        # split the remainder into components, top-down
        comp = np.full(verts.shape[0], -1, dtype=np.int64)
        pos = {}
        roots = []
        parent = t.parent
        for i in range(verts.shape[0] - 1, -1, -1):
            v = int(verts[i])
            pos[v] = i
            if in_cut[v]:
                continue
            p = int(parent[v])
            if p >= 0 and scr.stamp[p] == idx and not in_cut[p]:
                comp[i] = comp[pos[p]]
            else:
                comp[i] = len(roots)
                roots.append(v)
        keep = comp >= 0
        members = verts[keep]
        cids = comp[keep]
        order = np.argsort(cids, kind="stable")
        members, cids = members[order], cids[order]
        bounds = np.searchsorted(cids, np.arange(len(roots) + 1))
        # number components by ascending rank of their roots
        by_rank = sorted(range(len(roots)), key=lambda c: t.rank[roots[c]])
        for j, c in enumerate(by_rank, start=1):
            queue.append((members[bounds[c]:bounds[c + 1]], seq + (j,), idx))

    eu, ev, ew, ek = _edges(t, subtrees)
    g = SpannerGraph(n, eu, ev, ew, ek)
    return g, CanonicalDecomposition(k, subtrees, owner)


def _edges(t, subtrees):
    child = np.flatnonzero(t.parent >= 0)
    tu = np.minimum(child, t.parent[child])
    tv = np.maximum(child, t.parent[child])
    tw = t.weight[child]
    su, sv = [], []
    for rec in subtrees:
        c = np.sort(rec.cut)
        if c.shape[0] < 2:
            continue
        i, j = np.triu_indices(c.shape[0], 1)
        su.append(c[i])
        sv.append(c[j])
    if su:
        su = np.concatenate(su)
        sv = np.concatenate(sv)
        # drop pairs that are already tree edges
        istree = (t.parent[su] == sv) | (t.parent[sv] == su)
        su, sv = su[~istree], sv[~istree]
        sw = t.distances(su, sv)
    else:
        su = sv = np.zeros(0, dtype=np.int64)
        sw = np.zeros(0)
    eu = np.concatenate([tu, su]).astype(np.int64)
    ev = np.concatenate([tv, sv]).astype(np.int64)
    ew = np.concatenate([tw, sw]).astype(np.float64)
    ek = np.concatenate([np.full(tu.shape[0], TREE), np.full(su.shape[0], SHORTCUT)]).astype(np.int64)
    return eu, ev, ew, ek


def canonical_sequence(dec, v):
    """Canonical sequence of the subtree that owns ``v`` as a cut vertex."""
    return list(dec.owning(v).sequence)


# -- dumps -----------------------------------------------------------------------


def format_spanner(g, names=None):
    name = (lambda v: v) if names is None else (lambda v: names[v])
    out = io.StringIO()
    for u, v, w, k in zip(g.eu, g.ev, g.ew, g.ekind):
        out.write(f"{name(int(u))} {name(int(v))} {float(w):.17g} {KIND_CODES[k]}\n")
    return out.getvalue()


def format_decomposition(dec, names=None):
    name = (lambda v: v) if names is None else (lambda v: names[v])
    out = io.StringIO()
    for rec in dec:
        seq = ".".join(map(str, rec.sequence)) or "ε"
        cut = " ".join(str(name(int(c))) for c in rec.cut)
        out.write(f"{seq} | {name(rec.root)} | {name(rec.leftmost)} | {cut}\n")
    return out.getvalue()
