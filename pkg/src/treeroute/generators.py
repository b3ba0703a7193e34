"""Seeded instance generators. All randomness comes from numpy's PCG64."""

import numpy as np

from .doubling import PointMetric
from .tree import build_tree

RNG_NAME = "numpy-PCG64"

TREE_GENERATORS = ("random-recursive-tree", "path", "star", "caterpillar", "balanced-b-ary")
POINT_GENERATORS = ("grid-points", "uniform-points", "explicit")


def rng_for(seed):
    return np.random.default_rng(np.uint64(seed))


def _weights(rng, m):
    # uniform on (0, 1]
    return (1.0 - rng.random(m)).tolist()


def random_recursive_edges(n, rng):
    w = _weights(rng, max(n - 1, 0))
    return [(i, int(rng.integers(i)), w[i - 1]) for i in range(1, n)]


def path_edges(n, rng):
    w = _weights(rng, max(n - 1, 0))
    return [(i - 1, i, w[i - 1]) for i in range(1, n)]


def star_edges(n, rng):
    w = _weights(rng, max(n - 1, 0))
    return [(0, i, w[i - 1]) for i in range(1, n)]


def caterpillar_edges(n, rng):
    """Spine ``0..s-1`` with one leg per spine vertex while vertices last."""
    w = _weights(rng, max(n - 1, 0))
    spine = (n + 1) // 2
    edges = [(i - 1, i, w[i - 1]) for i in range(1, spine)]
    for j, v in enumerate(range(spine, n)):
        edges.append((j, v, w[v - 1]))
    return edges


def balanced_edges(n, rng, branching=2):
    w = _weights(rng, max(n - 1, 0))
    return [((i - 1) // branching, i, w[i - 1]) for i in range(1, n)]


def make_tree(generator, n, seed, branching=2):
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = rng_for(seed)
    if generator == "random-recursive-tree":
        edges = random_recursive_edges(n, rng)
    elif generator == "path":
        edges = path_edges(n, rng)
    elif generator == "star":
        edges = star_edges(n, rng)
    elif generator == "caterpillar":
        edges = caterpillar_edges(n, rng)
    elif generator == "balanced-b-ary":
        edges = balanced_edges(n, rng, branching)
    else:
        raise ValueError(f"unknown tree generator {generator!r}")
    return build_tree(edges, 0)


def grid_coords(n):
    side = int(np.ceil(np.sqrt(n)))
    i = np.arange(n)
    return np.stack([i % side, i // side], axis=1).astype(np.float64)


def uniform_coords(n, rng):
    return rng.random((n, 2)) * max(1.0, float(n))


def make_points(generator, n, seed):
    """Returns ``(metric, coords, matrix)``; one of the last two is ``None``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = rng_for(seed)
    if generator == "grid-points":
        xy = grid_coords(n)
        return PointMetric.euclidean(xy), xy, None
    if generator == "uniform-points":
        xy = uniform_coords(n, rng)
        return PointMetric.euclidean(xy), xy, None
    if generator == "explicit":
        # planar points given only through their distance matrix
        xy = uniform_coords(n, rng)
        d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1))
        return PointMetric.explicit(d), None, d
    raise ValueError(f"unknown point generator {generator!r}")


def sample_pairs(n, count, rng):
    """``count`` ordered pairs with distinct endpoints, or all pairs when ``count`` is None."""
    if n < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if count is None:
        u, v = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        m = u != v
        return u[m].astype(np.int64), v[m].astype(np.int64)
    u = rng.integers(n, size=count)
    v = (u + rng.integers(1, n, size=count)) % n
    return u.astype(np.int64), v.astype(np.int64)
