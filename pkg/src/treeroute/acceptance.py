"""The twelve acceptance criteria as callable checks.

Each ``criterion_N()`` returns a :class:`CriterionResult`; ``line()`` gives the
one-line PASS/FAIL summary printed by the test suite and the CLI.
"""

from functools import lru_cache
import time
from typing import NamedTuple

import numpy as np

from . import checks
from .doubling import ExactLabeling, build_net_hierarchy, build_net_tree, path_weight, reference_path, route_doubling
from .generators import TREE_GENERATORS, make_points, make_tree, rng_for, sample_pairs
from .harness import LIGHTNESS_C, ExperimentConfig, doubling_ratios, log_slope, run_experiment
from .kernels import ROUTE_OK
from .labels import assign_labels, label_storage_bits
from .router import hop_bound, hop_budget, route_many, routing_tables
from .spanner import build_spanner

TREE_SIZES = (100, 500, 2000)
TREE_KS = (4, 8, 16)
SWEEP_SIZES = tuple(2 ** e for e in range(7, 14))
POINT_SIZES = (64, 256, 1024)
POINT_SWEEP = tuple(2 ** e for e in range(6, 13))
GAMMAS = (8.0, 16.0)
PAIRS = 2000
RATIO_LIMIT = 1.5
SEED = 0


class CriterionResult(NamedTuple):
    number: int
    title: str
    passed: bool
    detail: str

    def line(self):
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}: {self.detail}"


@lru_cache(maxsize=None)
def tree_instance(generator, n, k, seed=SEED):
    t = make_tree(generator, n, seed)
    g, dec = build_spanner(t, k)
    return t, g, dec


@lru_cache(maxsize=None)
def net_instance(generator, n, gamma, seed=SEED):
    m, _, _ = make_points(generator, n, seed)
    levels = build_net_hierarchy(m)
    return m, levels, build_net_tree(levels, m, gamma, 4)


def all_tree_instances():
    for gen in TREE_GENERATORS:
        for n in TREE_SIZES:
            for k in TREE_KS:
                yield gen, n, k


def large_n(ratios):
    """The upper half of a sweep's doubling ratios."""
    return ratios[len(ratios) // 2:]


def _r(xs):
    return [round(x, 2) for x in xs]


def _routed(n, k, seed=SEED):
    t, g, dec = tree_instance("random-recursive-tree", n, k, seed)
    rng = rng_for(seed)
    src, dst = sample_pairs(n, None if n == 100 else PAIRS, rng)
    res = route_many(routing_tables(t, g), src, dst, hop_budget(dec.max_sequence_length()))
    return t, dec, src, dst, res


def criterion_1():
    t0 = time.perf_counter()
    bad = pairs = 0
    for n in TREE_SIZES:
        for k in TREE_KS:
            t, _, src, dst, res = _routed(n, k)
            bad += int(np.count_nonzero(res.status != ROUTE_OK))
            bad += checks.route_exactness(t, src, dst, res.weight)
            pairs += src.size
    el = time.perf_counter() - t0
    ok = bad == 0 and el <= 60.0
    return CriterionResult(1, "exact routing", ok, f"{bad} inexact of {pairs} routes, {el:.1f}s (limit 60s)")


def criterion_2():
    bad = pairs = 0
    for n in TREE_SIZES:
        for k in TREE_KS:
            t, _, src, dst, res = _routed(n, k)
            bad += checks.route_subsequence(t, src, dst, res)
            pairs += src.size
    return CriterionResult(2, "subsequence of tree path", bad == 0, f"{bad} violations of {pairs} routes")


def criterion_3():
    cut = shrink = strict = builds = 0
    for gen, n, k in all_tree_instances():
        _, _, dec = tree_instance(gen, n, k)
        cut += checks.cut_set_sizes(dec)
        shrink += checks.component_shrinkage(dec)
        strict += sum(1 for s in dec if s.cut.shape[0] > k + 1)
        builds += 1
    ok = cut == 0 and shrink == 0
    return CriterionResult(
        3, "cut-set size and shrinkage", ok,
        f"{cut} cut sets over k+1 in non-base subtrees, {shrink} oversized children over {builds} builds; "
        f"{strict} when base-case subtrees are counted too (informational)")


def criterion_4():
    deg = edges = base = 0
    worst = (0, None)
    for gen, n, k in all_tree_instances():
        t, g, _ = tree_instance(gen, n, k)
        deg += checks.degree_bound(t, g, k)
        edges += checks.edge_bound(t, g, k)
        base += checks.base_case_degree_bound(t, g, k)
        excess = g.max_degree() - (t.max_degree + k)
        if excess > worst[0]:
            worst = (excess, (gen, n, k))
    detail = f"{deg} builds over Delta+k, {edges} over n(k+2) edges"
    if worst[1]:
        detail += f"; worst excess {worst[0]} on {worst[1][0]} n={worst[1][1]} k={worst[1][2]}"
    detail += f"; {base} over max(Delta+k, 2k+3)"
    return CriterionResult(4, "degree and edge count", deg == 0 and edges == 0, detail)


def criterion_5():
    sizes, hops, ks = [], [], []
    over = 0
    for n in SWEEP_SIZES:
        t, g, dec = tree_instance("random-recursive-tree", n, 4)
        rng = rng_for(SEED)
        src, dst = sample_pairs(n, PAIRS, rng)
        K = dec.max_sequence_length()
        res = route_many(routing_tables(t, g), src, dst, hop_budget(K))
        over += int(np.count_nonzero(res.hops > hop_bound(K)))
        sizes.append(n)
        hops.append(int(res.hops.max()))
        ks.append(K)
    ratios = doubling_ratios(sizes, hops)
    tail = large_n(ratios)
    ok = over == 0 and all(r <= RATIO_LIMIT for r in tail)
    return CriterionResult(
        5, "tree hop diameter", ok,
        f"max hops {hops} K {ks}, {over} over 8K+4, slope {log_slope(sizes, hops):.2f}/log2 n, "
        f"doubling ratios {_r(ratios)}, large-n {_r(tail)} (limit {RATIO_LIMIT})")


def criterion_6():
    bad = 0
    worst = 0.0
    for gen, n, k in all_tree_instances():
        t, g, _ = tree_instance(gen, n, k)
        bits = label_storage_bits(assign_labels(t, g))
        bad += checks.label_bits_bound(t, bits, k)
        cap = 2 * n.bit_length() * (t.max_degree + k + 2)
        worst = max(worst, max(bits.values()) / cap)
    return CriterionResult(6, "label storage", bad == 0,
                           f"{bad} builds over 2*ceil(log2(n+1))*(Delta+k+2); worst bits/cap {worst:.3f}")


def criterion_7():
    bad = 0
    worst = 0.0
    for gen, n, k in all_tree_instances():
        t, g, _ = tree_instance(gen, n, k)
        r = g.total_weight() / t.total_weight()
        worst = max(worst, r / checks.lightness_cap(n, k, 1.0))
        bad += int(r > checks.lightness_cap(n, k, LIGHTNESS_C))
    return CriterionResult(7, "lightness", bad == 0,
                           f"{bad} builds over the cap; worst normalized ratio {worst:.4f} vs frozen C={LIGHTNESS_C}")


def criterion_8():
    t0 = time.perf_counter()
    bad = 0
    for gen in ("grid-points", "uniform-points"):
        for n in POINT_SIZES:
            for gamma in GAMMAS:
                m, levels, nt = net_instance(gen, n, gamma)
                bad += checks.net_packing_covering(levels, m)
                bad += checks.parent_distances(nt)
                bad += checks.cross_edges_exact(nt)
                bad += checks.cross_edges_monotone(nt)
                bad += checks.climb_distances(nt)
                bad += checks.light_partition(nt)
    el = time.perf_counter() - t0
    return CriterionResult(8, "net-tree structure", bad == 0 and el <= 120.0,
                           f"{bad} violations, {el:.1f}s (limit 120s)")


def criterion_9():
    bad = pairs = 0
    for gen in ("grid-points", "uniform-points"):
        for n in (64, 256):
            for gamma in GAMMAS:
                m, _, nt = net_instance(gen, n, gamma)
                ps, qs = sample_pairs(n, None, None)
                bad += checks.interval_contains_first_level(nt, ps, qs)
                pairs += ps.size
    return CriterionResult(9, "cross-edge level interval", bad == 0, f"{bad} misses of {pairs} pairs")


def _doubling_routes(gen, n, gamma):
    m, _, nt = net_instance(gen, n, gamma)
    labeling = ExactLabeling(m)
    src, dst = sample_pairs(n, PAIRS, rng_for(SEED))
    worse = 0
    stretch = 0.0
    hops = 0
    for p, q in zip(src.tolist(), dst.tolist()):
        tr = route_doubling(nt, labeling, p, q)
        ref = path_weight(nt, reference_path(nt, p, q))
        worse += int(tr.total_weight > ref * (1 + checks.REL_TOL))
        stretch = max(stretch, tr.total_weight / m.d(p, q))
        hops = max(hops, tr.hop_count)
    return worse, stretch, hops, src.size


def criterion_10():
    worse = pairs = 0
    per_gamma = {}
    for gamma in GAMMAS:
        top = 0.0
        for gen in ("grid-points", "uniform-points"):
            for n in POINT_SIZES:
                w, s, _, c = _doubling_routes(gen, n, gamma)
                worse += w
                pairs += c
                top = max(top, s)
        per_gamma[gamma] = top
    vals = [per_gamma[g] for g in GAMMAS]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    shown = ", ".join(f"gamma={g:g}: {per_gamma[g]:.4f}" for g in GAMMAS)
    return CriterionResult(10, "doubling routing stretch", worse == 0 and decreasing,
                           f"{worse} routes longer than the reference of {pairs}; max stretch {shown}")


def criterion_11():
    parts = []
    ok = True
    for gen in ("grid-points", "uniform-points"):
        hops = [_doubling_routes(gen, n, 8.0)[2] for n in POINT_SWEEP]
        ratios = doubling_ratios(list(POINT_SWEEP), hops)
        tail = large_n(ratios)
        ok &= all(r <= RATIO_LIMIT for r in tail)
        parts.append(f"{gen} max hops {hops} ratios {_r(ratios)}, large-n {_r(tail)}")
    return CriterionResult(11, "doubling hop diameter", ok, "; ".join(parts) + f" (limit {RATIO_LIMIT})")


def criterion_12():
    cfgs = [
        ExperimentConfig(generator="random-recursive-tree", n=500, k=4, seed=7, pairs=500),
        ExperimentConfig(generator="caterpillar", n=300, k=8, seed=11, pairs=300),
        ExperimentConfig(generator="uniform-points", n=128, gamma=8.0, seed=7, pairs=300),
    ]
    same = 0
    for cfg in cfgs:
        a = run_experiment(cfg).to_tsv()
        b = run_experiment(cfg).to_tsv()
        same += int(a == b)
    return CriterionResult(12, "determinism", same == len(cfgs),
                           f"{same}/{len(cfgs)} seeded reports byte-identical across repeated runs")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


def run(number):
    return CRITERIA[number]()


def run_all():
    return [run(i) for i in sorted(CRITERIA)]
