"""Timing of the numba kernels against their numpy fallbacks."""

import time

import numpy as np

from . import kernels
from ._accel import HAVE_NUMBA
from .generators import make_points, make_tree, rng_for, sample_pairs
from .router import hop_budget, routing_tables
from .spanner import build_spanner


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(n=20000, k=4, pairs=20000, points=1500, seed=0):
    """``(name, callable(use_numba))`` for each kernel on a fixed instance."""
    t = make_tree("random-recursive-tree", n, seed)
    g, dec = build_spanner(t, k)
    tables = routing_tables(t, g)
    src, dst = sample_pairs(n, pairs, rng_for(seed))
    budget = hop_budget(dec.max_sequence_length())
    m, _, _ = make_points("uniform-points", points, seed)
    cand = np.arange(points, dtype=np.int64)
    return [
        ("pair_distances", lambda nb: kernels.pair_distances(t.parent, t.weight, t.depth, src, dst, use_numba=nb)),
        ("route_many", lambda nb: kernels.route_many(*tables, src, dst, budget, use_numba=nb)),
        ("greedy_net", lambda nb: kernels.greedy_net(m.dist, cand, 4.0, use_numba=nb)),
    ]


def run_bench(repeat=3, **kw):
    """Rows of ``(kernel, numpy_s, numba_s, speedup)``; numba columns are NaN without numba."""
    rows = []
    for name, fn in kernel_cases(**kw):
        slow = _best(lambda: fn(False), repeat)
        if HAVE_NUMBA:
            fn(True)  # compile outside the timed runs
            fast = _best(lambda: fn(True), repeat)
        else:
            fast = float("nan")
        rows.append((name, slow, fast, slow / fast))
    return rows


def format_bench(rows):
    out = ["kernel\tnumpy_s\tnumba_s\tspeedup"]
    for name, slow, fast, sp in rows:
        out.append(f"{name}\t{slow:.4f}\t{fast:.4f}\t{sp:.1f}")
    return "\n".join(out) + "\n"
