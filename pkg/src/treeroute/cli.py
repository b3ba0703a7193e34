"""Command line entry point: ``treeroute <subcommand> ...``.

Exit status is 0 when every check passes, 1 when a checked property fails
and 2 on bad input.
"""

import argparse
import itertools
import sys

from . import acceptance
from .bench import format_bench, run_bench
from .doubling import (ExactLabeling, build_doubling_spanner, format_net_tree, format_points,
                       read_points, route_doubling)
from .generators import POINT_GENERATORS, TREE_GENERATORS, make_points, make_tree
from .harness import ExperimentConfig, StatsReport, calibrate_lightness, run_experiment
from .labels import assign_labels, format_labels
from .router import InvariantViolation, RouteAudit, simulate
from .spanner import build_spanner, format_decomposition, format_spanner
from .tree import format_tree, read_tree


def _pairs(text):
    return None if text == "all" else int(text)


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vertex(t, tok):
    try:
        return t.vertex(int(tok))
    except (ValueError, KeyError):
        return t.vertex(tok)


def cmd_gen_tree(a):
    t = make_tree(a.generator, a.n, a.seed, a.branching)
    _emit(format_tree(t), a.out)
    return 0


def cmd_gen_points(a):
    _, xy, d = make_points(a.generator, a.n, a.seed)
    _emit(format_points(xy, d), a.out)
    return 0


def cmd_build(a):
    if a.points:
        nt = build_doubling_spanner(read_points(a.points), a.gamma, a.k)
        _emit(format_net_tree(nt), a.out)
        return 0
    t = read_tree(a.tree)
    g, dec = build_spanner(t, a.k)
    _emit(format_spanner(g, t.names), a.out)
    if a.decomposition:
        _emit(format_decomposition(dec, t.names), a.decomposition)
    if a.labels:
        _emit(format_labels(assign_labels(t, g), t.names), a.labels)
    return 0


def cmd_route(a):
    if a.points:
        m = read_points(a.points)
        nt = build_doubling_spanner(m, a.gamma, a.k)
        tr = route_doubling(nt, ExactLabeling(m), int(a.source), int(a.dest))
        _emit(tr.format(m.names), a.out)
        return 0
    t = read_tree(a.tree)
    g, dec = build_spanner(t, a.k)
    views = assign_labels(t, g)
    audit = RouteAudit(t, g, dec) if a.audit else None
    tr = simulate(views, _vertex(t, a.source), _vertex(t, a.dest), audit=audit)
    _emit(tr.format(t.names), a.out)
    return 0


def _configs(a):
    for gen, n, k, gamma in itertools.product(a.generator, a.n, a.k, a.gamma):
        yield ExperimentConfig(generator=gen, n=n, k=k, gamma=gamma, seed=a.seed, pairs=a.pairs,
                               branching=a.branching, audit_pairs=a.audit_pairs, timing=a.timing)


def _report(a):
    cfgs = list(_configs(a))
    kinds = {c.is_tree for c in cfgs}
    if len(kinds) > 1:
        raise ValueError("tree and point generators need separate reports")
    report = None
    for cfg in cfgs:
        r = run_experiment(cfg)
        if report is None:
            report = StatsReport(r.columns, [])
        report.extend(r)
    return report


def _fail_message(report, seed):
    props = sorted({c for _, c in report.failures()})
    return f"invariant violated: {','.join(props)} (seed={seed})"


def cmd_report(a):
    report = _report(a)
    _emit(report.to_tsv(), a.out)
    if report.failures():
        print(_fail_message(report, a.seed), file=sys.stderr)
        return 1
    return 0


def cmd_verify(a):
    if a.criterion:
        nums = sorted(acceptance.CRITERIA) if a.criterion == "all" else [int(x) for x in a.criterion.split(",")]
        ok = True
        for i in nums:
            r = acceptance.run(i)
            print(r.line(), flush=True)
            ok &= r.passed
        return 0 if ok else 1
    report = _report(a)
    if a.out:
        _emit(report.to_tsv(), a.out)
    if report.failures():
        print(_fail_message(report, a.seed), file=sys.stderr)
        return 1
    print(f"all checks pass on {len(report.rows)} instance(s) (seed={a.seed})")
    return 0


def cmd_bench(a):
    _emit(format_bench(run_bench(a.repeat, n=a.n[0], k=a.k[0], pairs=a.pairs or 20000)), a.out)
    return 0


def cmd_calibrate(a):
    norm, (gen, n, k, ratio) = calibrate_lightness(a.seed)
    print(f"max normalized lightness {norm:.4f} on {gen} n={n} k={k} (ratio {ratio:.3f})")
    return 0


def _experiment_flags(p, *, n_default=500):
    p.add_argument("--generator", nargs="+", default=["random-recursive-tree"],
                   choices=TREE_GENERATORS + POINT_GENERATORS)
    p.add_argument("--n", type=int, nargs="+", default=[n_default])
    p.add_argument("--k", type=int, nargs="+", default=[4])
    p.add_argument("--gamma", type=float, nargs="+", default=[8.0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=_pairs, default=2000, help="a count, or 'all'")
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--audit-pairs", type=int, default=200)
    p.add_argument("--timing", action="store_true", help="add a wall-time column")
    p.add_argument("--out")


def build_parser():
    ap = argparse.ArgumentParser(prog="treeroute", description="Tree-metric spanners with local routing.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen-tree", help="write a seeded random tree")
    p.add_argument("--generator", default="random-recursive-tree", choices=TREE_GENERATORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_tree)

    p = sub.add_parser("gen-points", help="write a seeded point set")
    p.add_argument("--generator", default="uniform-points", choices=POINT_GENERATORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_points)

    for name, fn, hlp in (("build", cmd_build, "build a spanner from a tree or point file"),
                          ("route", cmd_route, "route one message and print its trace")):
        p = sub.add_parser(name, help=hlp)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--tree")
        src.add_argument("--points")
        p.add_argument("--k", type=int, default=4)
        p.add_argument("--gamma", type=float, default=8.0)
        p.add_argument("--out")
        if name == "build":
            p.add_argument("--decomposition", help="also write the canonical decomposition here")
            p.add_argument("--labels", help="also write the interval labels here")
        else:
            p.add_argument("--source", required=True)
            p.add_argument("--dest", required=True)
            p.add_argument("--audit", action="store_true", help="cross-check every decision")
        p.set_defaults(fn=fn)

    p = sub.add_parser("verify", help="check every property on generated instances, or an acceptance criterion")
    _experiment_flags(p)
    p.add_argument("--criterion", help="acceptance criterion number(s), comma separated, or 'all'")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("report", help="tab-separated statistics, one row per instance")
    _experiment_flags(p)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("bench", help="time numba kernels against the numpy fallbacks")
    p.add_argument("--n", type=int, nargs=1, default=[20000])
    p.add_argument("--k", type=int, nargs=1, default=[4])
    p.add_argument("--pairs", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("calibrate", help="measure the lightness constant")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_calibrate)
    return ap


def main(argv=None):
    a = build_parser().parse_args(argv)
    try:
        return a.fn(a)
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
