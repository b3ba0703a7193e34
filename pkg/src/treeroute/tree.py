"""Weighted rooted trees with largest-subtree-first child order and post-order ranks.

A :class:`RootedTree` is a bundle of flat numpy arrays indexed by dense vertex
id ``0..n-1``. External vertex names (anything hashable and sortable) are
remapped on construction and kept in ``names`` for output.

Text format::

    # comment
    n root
    parent child weight      (n - 1 lines)
"""

import io
import math
from collections import deque

import numpy as np

from . import kernels


class TreeError(ValueError):
    """Input does not describe a valid weighted tree."""


class CycleError(TreeError):
    pass


class DisconnectedError(TreeError):
    pass


class WeightError(TreeError):
    pass


class DuplicateEdgeError(TreeError):
    pass


class UnknownVertexError(KeyError):
    pass


class RootedTree:
    """Immutable rooted tree.

    Arrays (length ``n`` unless noted)
    ----------------------------------
    parent       : int64    parent id, -1 at the root
    weight       : float64  weight of the edge to the parent, 0 at the root
    child_ptr    : int64    [n+1] CSR offsets into ``child_list``
    child_list   : int64    children, largest subtree first, ties by id
    size         : int64    subtree size
    rank         : int64    post-order rank in ``1..n``
    low          : int64    minimum rank over the subtree
    depth        : int64    edge count from the root
    leftmost     : int64    end of the first-child chain from each vertex
    order        : int64    vertices in post-order (``order[rank-1] == v``)
    """

    def __init__(self, n, root, parent, weight, child_ptr, child_list, names=None):
        self.n = int(n)
        self.root = int(root)
        self.parent = parent
        self.weight = weight
        self.child_ptr = child_ptr
        self.child_list = child_list
        self.names = names
        self._index = None if names is None else {name: i for i, name in enumerate(names)}
        self._finish()

    def _finish(self):
        n = self.n
        ptr, cl = self.child_ptr, self.child_list
        first = np.full(n, -1, dtype=np.int64)
        has = ptr[1:] > ptr[:-1]
        first[has] = cl[ptr[:-1][has]]
        self.first_child = first

        depth = np.zeros(n, dtype=np.int64)
        bfs = [self.root]
        for v in bfs:
            for c in cl[ptr[v]:ptr[v + 1]]:
                depth[c] = depth[v] + 1
                bfs.append(int(c))
        self.depth = depth

        order = np.empty(n, dtype=np.int64)
        rank = np.empty(n, dtype=np.int64)
        # iterative post-order, children visited in stored order
        pos = 0
        stack = [(self.root, 0)]
        while stack:
            v, i = stack.pop()
            if ptr[v] + i < ptr[v + 1]:
                stack.append((v, i + 1))
                stack.append((int(cl[ptr[v] + i]), 0))
            else:
                order[pos] = v
                pos += 1
                rank[v] = pos
        self.order = order
        self.rank = rank

        size = np.ones(n, dtype=np.int64)
        low = rank.copy()
        leftmost = np.arange(n, dtype=np.int64)
        for v in order:
            p = self.parent[v]
            if p >= 0:
                size[p] += size[v]
                if low[v] < low[p]:
                    low[p] = low[v]
        for v in order:
            if first[v] >= 0:
                leftmost[v] = leftmost[first[v]]
        self.size = size
        self.low = low
        self.leftmost = leftmost

        self.max_degree = int(self.degrees().max()) if n else 0
        self._up = None

    # -- basic queries -------------------------------------------------------

    def check(self, v):
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
            raise UnknownVertexError(v)
        if not 0 <= v < self.n:
            raise UnknownVertexError(v)
        return int(v)

    def vertex(self, name):
        """Dense id for an external vertex name."""
        if self._index is None:
            return self.check(name)
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVertexError(name) from None

    def name(self, v):
        return v if self.names is None else self.names[v]

    def children(self, v):
        return self.child_list[self.child_ptr[v]:self.child_ptr[v + 1]]

    def degrees(self):
        deg = np.diff(self.child_ptr).astype(np.int64)
        deg[self.parent >= 0] += 1
        return deg

    def is_ancestor(self, a, b):
        """True when ``a`` is an ancestor of ``b`` (every vertex is its own)."""
        return self.low[a] <= self.rank[b] <= self.rank[a]

    def edges(self):
        """``(parent, child, weight)`` for every edge, children in id order."""
        vs = np.flatnonzero(self.parent >= 0)
        return [(int(self.parent[v]), int(v), float(self.weight[v])) for v in vs]

    def total_weight(self):
        return float(math.fsum(self.weight))

    # -- lca / distance --------------------------------------------------------

    def _lifting(self):
        if self._up is None:
            n = self.n
            levels = max(1, int(self.depth.max()).bit_length()) if n else 1
            up = np.empty((levels, n), dtype=np.int64)
            up[0] = np.where(self.parent >= 0, self.parent, np.arange(n))
            for j in range(1, levels):
                up[j] = up[j - 1][up[j - 1]]
            self._up = up
        return self._up

    def lca_many(self, us, vs):
        """Vectorised lowest common ancestors via binary lifting."""
        up = self._lifting()
        a = np.asarray(us, dtype=np.int64).copy()
        b = np.asarray(vs, dtype=np.int64).copy()
        swap = self.depth[a] < self.depth[b]
        a[swap], b[swap] = b[swap], a[swap].copy()
        diff = self.depth[a] - self.depth[b]
        for j in range(up.shape[0]):
            m = (diff >> j) & 1 == 1
            a[m] = up[j][a[m]]
        for j in range(up.shape[0] - 1, -1, -1):
            m = up[j][a] != up[j][b]
            a[m] = up[j][a[m]]
            b[m] = up[j][b[m]]
        return np.where(a == b, a, up[0][a])

    def ancestor_at_depth(self, v, depth):
        up = self._lifting()
        diff = int(self.depth[v]) - int(depth)
        if diff < 0:
            raise ValueError("target depth below vertex")
        j = 0
        while diff:
            if diff & 1:
                v = int(up[j][v])
            diff >>= 1
            j += 1
        return int(v)

    def path(self, u, v):
        """Explicit vertex sequence of the tree path from ``u`` to ``v``."""
        a = lca(self, u, v)
        up_part = []
        while u != a:
            up_part.append(u)
            u = int(self.parent[u])
        down = []
        while v != a:
            down.append(v)
            v = int(self.parent[v])
        return up_part + [a] + down[::-1]

    def distances(self, us, vs, use_numba=None):
        return kernels.pair_distances(self.parent, self.weight, self.depth, us, vs, use_numba=use_numba)


def _dense_ids(vertices):
    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in vertices):
        if set(int(v) for v in vertices) == set(range(len(vertices))):
            return None
    try:
        return sorted(vertices)
    except TypeError:
        return list(vertices)


def build_tree(edges, root, *, allow_zero_weights=False):
    """Validate ``(u, v, w)`` edges and return the tree rooted at ``root``.

    Children are ordered by subtree size, largest first, ties broken by the
    smaller dense id. ``allow_zero_weights`` admits zero-length edges (the
    net-tree light subtrees have them between nodes sharing a representative).
    """
    edges = list(edges)
    seen = {}
    vertices = {root: None}
    for e in edges:
        if len(e) != 3:
            raise TreeError(f"edge {e!r} is not a (u, v, weight) triple")
        u, v, w = e
        try:
            w = float(w)
        except (TypeError, ValueError):
            raise WeightError(f"edge ({u}, {v}) has non-numeric weight {w!r}") from None
        if not math.isfinite(w) or w < 0 or (w == 0 and not allow_zero_weights):
            raise WeightError(f"edge ({u}, {v}) has nonpositive or non-finite weight {w!r}")
        if u == v:
            raise CycleError(f"self-loop at vertex {u}")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdgeError(f"edge ({u}, {v}) appears more than once")
        seen[key] = w
        vertices.setdefault(u, None)
        vertices.setdefault(v, None)

    names = _dense_ids(list(vertices))
    index = {v: v for v in vertices} if names is None else {v: i for i, v in enumerate(names)}
    n = len(vertices)

    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        a, b = index[u], index[v]
        ra, rb = find(a), find(b)
        if ra == rb:
            raise CycleError(f"edge ({u}, {v}) closes a cycle")
        uf[ra] = rb
        adj[a].append((b, float(w)))
        adj[b].append((a, float(w)))

    r = index[root]
    parent = np.full(n, -1, dtype=np.int64)
    weight = np.zeros(n, dtype=np.float64)
    seen_v = np.zeros(n, dtype=bool)
    seen_v[r] = True
    bfs = deque([r])
    order = []
    while bfs:
        x = bfs.popleft()
        order.append(x)
        for y, w in adj[x]:
            if not seen_v[y]:
                seen_v[y] = True
                parent[y] = x
                weight[y] = w
                bfs.append(y)
    if len(order) != n:
        missing = next(i for i in range(n) if not seen_v[i])
        name = missing if names is None else names[missing]
        raise DisconnectedError(f"vertex {name} is not connected to root {root}")

    size = np.ones(n, dtype=np.int64)
    for x in reversed(order):
        if parent[x] >= 0:
            size[parent[x]] += size[x]
    kids = [[] for _ in range(n)]
    for x in order[1:]:
        kids[parent[x]].append(x)
    ptr = np.zeros(n + 1, dtype=np.int64)
    flat = []
    for x in range(n):
        ks = sorted(kids[x], key=lambda c: (-size[c], c))
        flat.extend(ks)
        ptr[x + 1] = len(flat)
    return RootedTree(n, r, parent, weight, ptr, np.asarray(flat, dtype=np.int64), names)


def tree_distance(t, u, v):
    """Weight of the tree path between ``u`` and ``v``, summed edge by edge."""
    u, v = t.check(u), t.check(v)
    s = 0.0
    while t.depth[u] > t.depth[v]:
        s += t.weight[u]
        u = t.parent[u]
    while t.depth[v] > t.depth[u]:
        s += t.weight[v]
        v = t.parent[v]
    while u != v:
        s += t.weight[u]
        s += t.weight[v]
        u, v = t.parent[u], t.parent[v]
    return float(s)


def lca(t, u, v):
    u, v = t.check(u), t.check(v)
    return int(t.lca_many([u], [v])[0])


def leftmost_descendant(t, v):
    """Follow first-child links from ``v`` down to the end of the chain."""
    v = t.check(v)
    while t.first_child[v] >= 0:
        v = int(t.first_child[v])
    return v


# -- text format ---------------------------------------------------------------


def _parse_token(tok):
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_tree(text, *, allow_zero_weights=False):
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise TreeError("first line must be 'n root'")
    n = int(lines[0][0])
    root = _parse_token(lines[0][1])
    body = lines[1:]
    if len(body) != n - 1:
        raise TreeError(f"expected {n - 1} edge lines, found {len(body)}")
    edges = []
    for ln in body:
        if len(ln) != 3:
            raise TreeError(f"bad edge line: {' '.join(ln)}")
        edges.append((_parse_token(ln[0]), _parse_token(ln[1]), float(ln[2])))
    t = build_tree(edges, root, allow_zero_weights=allow_zero_weights)
    if t.n != n:
        raise TreeError(f"header says n={n} but edges name {t.n} vertices")
    return t


def read_tree(path):
    with open(path) as fh:
        return parse_tree(fh.read())


def format_tree(t):
    out = io.StringIO()
    out.write(f"{t.n} {t.name(t.root)}\n")
    for p, c, w in t.edges():
        out.write(f"{t.name(p)} {t.name(c)} {w:.17g}\n")
    return out.getvalue()


def write_tree(t, path):
    with open(path, "w") as fh:
        fh.write(format_tree(t))
