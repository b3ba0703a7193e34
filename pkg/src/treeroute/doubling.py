"""Net-tree (1+eps)-spanner for doubling metrics, with light-subtree shortcutting.

Points are scaled so the closest pair sits at distance 1. Level ``i`` of the
net tree holds a ``2**i``-net of level ``i - 1``; same-level nodes within
``gamma * 2**i`` get cross edges; the subtrees hanging below the light cut
level are shortcut with :func:`treeroute.spanner.build_spanner` and routed
with :mod:`treeroute.router`.

Distances are held as a dense matrix, which is what the exhaustive checks
need anyway; this caps practical instance size at a few thousand points.
"""

from dataclasses import dataclass, field
import io
import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .labels import assign_labels, label_bits_width, label_storage_bits
from .router import InvariantViolation, RoutingError, hop_budget, simulate
from .spanner import build_spanner
from .tree import build_tree

EPS = 1e-12


class MetricError(ValueError):
    pass


class PointMetric:
    """A finite metric, normalised so the minimum inter-point distance is 1.

    ``kind`` is ``'euclidean'`` (``coords`` holds scaled 2-d coordinates) or
    ``'explicit'`` (only ``dist`` is meaningful).
    """

    def __init__(self, kind, dist, coords=None, names=None, scale=1.0):
        self.kind = kind
        self.dist = dist
        self.coords = coords
        self.names = names
        self.scale = scale
        self.n = dist.shape[0]
        self.diameter = float(dist.max()) if self.n > 1 else 0.0

    @classmethod
    def euclidean(cls, coords, names=None):
        raw = np.asarray(coords, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[1] != 2 or raw.shape[0] < 1:
            raise MetricError("coordinates must be an (n, 2) array with n >= 1")
        if not np.all(np.isfinite(raw)):
            raise MetricError("non-finite coordinate")
        d = _euclid(raw)
        scale = _min_positive(d)
        xy = _scaled(raw, scale)
        return cls("euclidean", _euclid(xy), xy, names, scale)

    @classmethod
    def explicit(cls, matrix, names=None, validate=True):
        m = np.array(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise MetricError("distance matrix must be square and non-empty")
        if validate:
            _validate_matrix(m)
        scale = _min_positive(m)
        return cls("explicit", _scaled(m, scale), None, names, scale)

    def d(self, p, q):
        return float(self.dist[p, q])


def _scaled(a, scale):
    with np.errstate(over="ignore"):
        out = a / scale
    if not np.all(np.isfinite(out)):
        raise MetricError("aspect ratio overflows float64 after normalising")
    return out


def _euclid(xy):
    dx = xy[:, 0][:, None] - xy[:, 0][None, :]
    dy = xy[:, 1][:, None] - xy[:, 1][None, :]
    return np.hypot(dx, dy)  # no underflow on tiny separations


def _min_positive(d):
    n = d.shape[0]
    if n < 2:
        return 1.0
    off = d[~np.eye(n, dtype=bool)]
    if np.any(off <= 0):
        raise MetricError("two distinct points are at distance 0")
    return float(off.min())


def _validate_matrix(m):
    if not np.all(np.isfinite(m)):
        raise MetricError("non-finite distance")
    if not np.allclose(m, m.T, rtol=0, atol=0):
        raise MetricError("distance matrix is not symmetric")
    if np.any(np.diag(m) != 0):
        raise MetricError("nonzero diagonal")
    n = m.shape[0]
    tol = 1e-12 * max(1.0, float(m.max()))
    for k in range(n):
        # m[i, j] <= m[i, k] + m[k, j] for every i, j
        if np.any(m > m[:, k][:, None] + m[k, :][None, :] + tol):
            raise MetricError("triangle inequality fails")


# -- distance labels ------------------------------------------------------------


class ExactLabeling:
    """Distance labels with ``delta = 0``: coordinates, or a full distance row."""

    delta = 0.0

    def __init__(self, metric):
        self.metric = metric
        if metric.kind == "euclidean":
            self._labels = [tuple(map(float, xy)) for xy in metric.coords]
        else:
            self._labels = [metric.dist[p].copy() for p in range(metric.n)]

    def label(self, p):
        return (p, self._labels[p])

    def estimate(self, a, b):
        """Distance estimate from two labels alone."""
        (p, la), (q, lb) = a, b
        if self.metric.kind == "euclidean":
            dx = la[0] - lb[0]
            dy = la[1] - lb[1]
            return math.hypot(dx, dy)
        return float(la[q])

    def bits(self, p):
        """Storage of one label at 64 bits per stored number."""
        return 64 * (2 if self.metric.kind == "euclidean" else self.metric.n)


# -- nets and the net tree --------------------------------------------------------


def build_net_hierarchy(m, use_numba=None):
    """Nested greedy nets ``N_0 = M, N_1, ..., N_top`` with ``|N_top| = 1``.

    ``N_i`` scans ``N_{i-1}`` in ascending point id and keeps every point
    farther than ``2**i`` from all points already kept.
    """
    levels = [np.arange(m.n, dtype=np.int64)]
    i = 0
    while levels[-1].shape[0] > 1:
        i += 1
        levels.append(kernels.greedy_net(m.dist, levels[-1], 2.0 ** i, EPS, use_numba=use_numba))
    return levels


def cross_edge_target_interval(dtilde, gamma, delta=0.0, top=None):
    """Level interval ``[lo, hi]`` that must contain the first cross-edge level.

    ``lo = floor(log2(d / ((gamma + 4)(1 + delta))))`` and
    ``hi = ceil(log2(d / (gamma - 4)))``, both clamped to ``[0, top]``.
    """
    if not dtilde > 0:
        raise ValueError(f"distance estimate must be positive, got {dtilde!r}")
    if not gamma > 4:
        raise ValueError(f"gamma must exceed 4, got {gamma!r}")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    lo = _floor_log2(dtilde / ((gamma + 4.0) * (1.0 + delta)))
    hi = _ceil_log2(dtilde / (gamma - 4.0))
    lo = max(lo, 0)
    hi = max(hi, 0)
    if top is not None:
        lo = min(lo, top)
        hi = min(hi, top)
    return lo, hi


def _floor_log2(x):
    m, e = math.frexp(x)
    return e - 1


def _ceil_log2(x):
    m, e = math.frexp(x)
    return e - 1 if m == 0.5 else e


@dataclass
class LightSubtree:
    root: int  # net-tree node
    nodes: np.ndarray  # local id -> node
    tree: object
    graph: object
    dec: object
    views: dict


@dataclass
class NetTree:
    """Net tree with cross edges and shortcut light subtrees.

    Node arrays: ``level``, ``rep``, ``parent`` (-1 at the root). Leaves are
    nodes ``0..n-1`` and leaf ``p`` represents point ``p``. ``tree`` is the
    whole hierarchy as a :class:`~treeroute.tree.RootedTree` (edge weight =
    distance between representatives), whose interval labels drive the
    ancestor tests.
    """

    metric: PointMetric
    gamma: float
    k: int
    levels: list
    level: np.ndarray
    rep: np.ndarray
    parent: np.ndarray
    cross: list  # per node: sorted array of cross-edge neighbours
    tree: object
    cut_level: int
    light_of: np.ndarray  # node -> light subtree index or -1
    local_of: np.ndarray  # node -> local id inside its light subtree
    lights: list = field(default_factory=list)

    @property
    def top(self):
        return len(self.levels) - 1

    @property
    def node_count(self):
        return int(self.level.shape[0])

    @property
    def root(self):
        return self.node_count - 1

    def node_at(self, level, point):
        return int(self._node_index[level][point])

    def ancestor_at_level(self, node, level):
        while self.level[node] < level:
            node = int(self.parent[node])
        return node

    def is_ancestor(self, a, b):
        return self.tree.is_ancestor(a, b)

    def nodes_of_point(self, p):
        return np.flatnonzero(self.rep == p)

    def light_k_max(self):
        return max((lt.dec.max_sequence_length() for lt in self.lights), default=0)

    def hop_budget(self):
        return 2 * (self.top + 1) + 2 * hop_budget(self.light_k_max()) + 4


def light_cut_level(diameter, n, top):
    """Top level of the light subtrees; the whole tree when ``D <= n``."""
    if n <= 1 or diameter <= n:
        return top
    return min(max(_ceil_log2(diameter / n), 0), top)


def build_net_tree(levels, metric, gamma, k, use_numba=None):
    """Net tree over ``levels`` with cross edges and shortcut light subtrees."""
    if not gamma > 4:
        raise ValueError(f"gamma must exceed 4, got {gamma!r}")
    if int(k) != k or k < 4:
        raise ValueError(f"k must be an integer >= 4, got {k!r}")
    dist = metric.dist
    sizes = [lv.shape[0] for lv in levels]
    offset = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    total = int(offset[-1])
    level = np.repeat(np.arange(len(levels)), sizes).astype(np.int64)
    rep = np.concatenate(levels).astype(np.int64)
    parent = np.full(total, -1, dtype=np.int64)
    index = []
    for i, lv in enumerate(levels):
        ix = np.full(metric.n, -1, dtype=np.int64)
        ix[lv] = offset[i] + np.arange(lv.shape[0])
        index.append(ix)

    for i in range(len(levels) - 1):
        up = levels[i + 1]
        thr = 2.0 ** (i + 1) * (1 + EPS)
        near = dist[np.ix_(levels[i], up)] <= thr
        has = near.any(axis=1)
        if not has.all():
            bad = levels[i][~has][0]
            raise InvariantViolation("covering parent exists", f"point {bad} at level {i}")
        parent[offset[i]:offset[i + 1]] = offset[i + 1] + near.argmax(axis=1)

    cross = [np.zeros(0, dtype=np.int64)] * total
    for i, lv in enumerate(levels):
        if lv.shape[0] < 2:
            continue
        sub = dist[np.ix_(lv, lv)]
        close = sub <= gamma * 2.0 ** i * (1 + EPS)
        np.fill_diagonal(close, False)
        for a in np.flatnonzero(close.any(axis=1)):
            cross[offset[i] + a] = offset[i] + np.flatnonzero(close[a])

    child = np.flatnonzero(parent >= 0)
    w = dist[rep[child], rep[parent[child]]]
    edges = list(zip(parent[child].tolist(), child.tolist(), w.tolist()))
    whole = build_tree(edges, total - 1, allow_zero_weights=True)

    top = len(levels) - 1
    cut = light_cut_level(metric.diameter, metric.n, top)
    light_of = np.full(total, -1, dtype=np.int64)
    local_of = np.full(total, -1, dtype=np.int64)
    nt = NetTree(metric, float(gamma), int(k), levels, level, rep, parent, cross, whole,
                 cut, light_of, local_of)
    nt._node_index = index

    for j, r in enumerate(range(offset[cut], offset[cut + 1])):
        lo, hi = whole.low[r], whole.rank[r]
        members = whole.order[lo - 1:hi]
        light_of[members] = j
        local_of[members] = np.arange(members.shape[0])
        mset = members[:-1]
        ledges = [(int(local_of[parent[x]]), int(local_of[x]), float(whole.weight[x])) for x in mset]
        lt = build_tree(ledges, int(local_of[r]), allow_zero_weights=True)
        g, dec = build_spanner(lt, k)
        nt.lights.append(LightSubtree(int(r), members, lt, g, dec, assign_labels(lt, g)))
    return nt


def build_doubling_spanner(metric, gamma, k=4, use_numba=None):
    levels = build_net_hierarchy(metric, use_numba=use_numba)
    return build_net_tree(levels, metric, gamma, k, use_numba=use_numba)


def spanner_edges(nt):
    """Edge set of H on points: ``{(p, q): weight}`` with ``p < q``."""
    pairs = set()
    rep = nt.rep
    for x in range(nt.node_count):
        p = nt.parent[x]
        if p >= 0:
            pairs.add((int(rep[x]), int(rep[p])))
        for y in nt.cross[x]:
            pairs.add((int(rep[x]), int(rep[y])))
    for lt in nt.lights:
        g = lt.graph
        for a, b in zip(g.eu, g.ev):
            pairs.add((int(rep[lt.nodes[a]]), int(rep[lt.nodes[b]])))
    out = {}
    for p, q in pairs:
        if p != q:
            key = (min(p, q), max(p, q))
            out[key] = nt.metric.d(*key)
    return out


# -- routing ------------------------------------------------------------------------


class DoublingHeader(NamedTuple):
    dest_point: int
    dest_label: tuple  # interval label of the destination leaf
    target_level: int
    position: int  # current net-tree node


@dataclass
class DoublingTrace:
    points: list  # H vertices visited, self-hops removed
    nodes: list  # net-tree positions, including same-representative moves
    states: list
    weights: list = field(default_factory=list)
    target_level: int = 0

    @property
    def hop_count(self):
        return len(self.points) - 1

    @property
    def total_weight(self):
        return float(sum(self.weights))

    def format(self, names=None):
        name = (lambda v: v) if names is None else (lambda v: names[v])
        out = io.StringIO()
        cum = 0.0
        out.write(f"0 {name(self.points[0])} - 0 0\n")
        for i, (p, s, w) in enumerate(zip(self.points[1:], self.states, self.weights), start=1):
            cum += w
            out.write(f"{i} {name(p)} {s} {w:.17g} {cum:.17g}\n")
        return out.getvalue()


def _light_route(nt, a, b):
    """Node sequence of the 1-spanner route from node ``a`` to node ``b`` in one light subtree."""
    lt = nt.lights[nt.light_of[a]]
    la, lb = int(nt.local_of[a]), int(nt.local_of[b])
    tr = simulate(lt.views, la, lb)
    return [int(lt.nodes[x]) for x in tr.hops[1:]]


def route_doubling(nt, labeling, p, q):
    """Route from point ``p`` to point ``q`` over the net-tree spanner.

    States: ascend toward the target level, search for a cross edge into an
    ancestor of ``q``, descend to ``q``. Inside a light subtree the ascent and
    descent use the tree-metric router.
    """
    if p == q:
        raise ValueError("source and destination coincide")
    dtilde = labeling.estimate(labeling.label(p), labeling.label(q))
    target, _ = cross_edge_target_interval(dtilde, nt.gamma, labeling.delta, nt.top)
    t = nt.tree
    v = int(q)  # leaves are nodes 0..n-1
    header = DoublingHeader(int(q), (int(t.low[v]), int(t.rank[v])), target, int(p))
    budget = nt.hop_budget()
    u = header.position
    nodes = [u]
    states = []
    low, rank = t.low, t.rank
    dl, dr = header.dest_label

    def is_anc_of_dest(x):
        return low[x] <= dr <= rank[x]

    while u != v:
        if len(nodes) > budget:
            raise RoutingError(f"hop budget {budget} exceeded", nodes)
        if is_anc_of_dest(u):
            state = "descend"
            if nt.light_of[u] >= 0:
                step = _light_route(nt, u, v)
            else:
                kids = t.children(u)
                step = [int(next(c for c in kids if is_anc_of_dest(c)))]
        elif nt.level[u] < header.target_level:
            state = "ascend"
            if nt.light_of[u] >= 0:
                goal = nt.ancestor_at_level(u, min(header.target_level, nt.cut_level))
                step = _light_route(nt, u, goal) if goal != u else [int(nt.parent[u])]
            else:
                step = [int(nt.parent[u])]
        else:
            state = "search"
            hits = [int(x) for x in nt.cross[u] if is_anc_of_dest(x)]
            if hits:
                step = [min(hits, key=lambda x: rank[x])]
            else:
                if nt.parent[u] < 0:
                    raise RoutingError(f"no cross edge toward {q} at the root", nodes)
                step = [int(nt.parent[u])]
        nodes.extend(step)
        states.extend([state] * len(step))
        u = nodes[-1]

    rep = nt.rep
    points = [int(rep[nodes[0]])]
    pstates, weights = [], []
    for x, s in zip(nodes[1:], states):
        r = int(rep[x])
        if r != points[-1]:
            weights.append(nt.metric.d(points[-1], r))
            points.append(r)
            pstates.append(s)
    return DoublingTrace(points, nodes, pstates, weights, target)


def first_joined_level(nt, p, q):
    """Smallest level at which the ancestors of ``p`` and ``q`` coincide or share a cross edge."""
    a, b = int(p), int(q)
    while True:
        if a == b or b in nt.cross[a]:
            return int(nt.level[a])
        a, b = int(nt.parent[a]), int(nt.parent[b])


def reference_path(nt, p, q):
    """Climb from ``p`` to the first joined level, cross, descend to ``q``; returns node list."""
    i = first_joined_level(nt, p, q)
    up = [int(p)]
    while nt.level[up[-1]] < i:
        up.append(int(nt.parent[up[-1]]))
    down = [int(q)]
    while nt.level[down[-1]] < i:
        down.append(int(nt.parent[down[-1]]))
    if up[-1] == down[-1]:
        down.pop()
    return up + down[::-1]


def path_weight(nt, nodes):
    reps = nt.rep[np.asarray(nodes)]
    return float(sum(nt.metric.d(int(a), int(b)) for a, b in zip(reps[:-1], reps[1:]) if a != b))


def doubling_label_bits(nt, labeling):
    """Per point: ``(net-tree label bits, distance-label bits)``.

    Net-tree bits count one interval label per represented node plus, for
    nodes inside a light subtree, that node's 1-spanner label storage.
    """
    width = label_bits_width(nt.node_count)
    light_bits = [label_storage_bits(lt.views) for lt in nt.lights]
    tree_bits = np.zeros(nt.metric.n, dtype=np.int64)
    for x in range(nt.node_count):
        b = 2 * width
        j = nt.light_of[x]
        if j >= 0:
            b += light_bits[j][int(nt.local_of[x])]
        tree_bits[nt.rep[x]] += b
    return {p: (int(tree_bits[p]), labeling.bits(p)) for p in range(nt.metric.n)}


# -- files ------------------------------------------------------------------------------


def parse_points(text):
    rows = [ln.split() for ln in text.splitlines()]
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if not rows:
        raise MetricError("empty points file")
    if len(rows[0]) == 1:
        n = int(rows[0][0])
        body = rows[1:]
        if len(body) != n or any(len(r) != n for r in body):
            raise MetricError(f"expected an {n}x{n} matrix")
        return PointMetric.explicit([[float(x) for x in r] for r in body])
    names, xy = [], []
    for r in rows:
        if len(r) != 3:
            raise MetricError(f"bad point line: {' '.join(r)}")
        names.append(int(r[0]) if r[0].lstrip("-").isdigit() else r[0])
        xy.append((float(r[1]), float(r[2])))
    dense = names == list(range(len(names)))
    return PointMetric.euclidean(np.array(xy), None if dense else names)


def read_points(path):
    with open(path) as fh:
        return parse_points(fh.read())


def format_points(coords=None, matrix=None, names=None):
    out = io.StringIO()
    if matrix is not None:
        m = np.asarray(matrix)
        out.write(f"{m.shape[0]}\n")
        for row in m:
            out.write(" ".join(f"{x:.17g}" for x in row) + "\n")
        return out.getvalue()
    for i, (x, y) in enumerate(np.asarray(coords)):
        out.write(f"{i if names is None else names[i]} {x:.17g} {y:.17g}\n")
    return out.getvalue()


def format_net_tree(nt):
    out = io.StringIO()
    for x in range(nt.node_count):
        out.write(f"{nt.level[x]} {x} {nt.rep[x]} {nt.parent[x]}\n")
    for x in range(nt.node_count):
        for y in nt.cross[x]:
            if x < y:
                out.write(f"cross {x} {y}\n")
    for lt in nt.lights:
        out.write(f"light-root {lt.root}\n")
    return out.getvalue()
