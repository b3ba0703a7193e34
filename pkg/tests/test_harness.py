import os
import subprocess
import sys

import pytest

from treeroute.cli import main
from treeroute.harness import (POINT_COLUMNS, TREE_COLUMNS, ExperimentConfig, StatsReport,
                               doubling_ratios, log_slope, run_experiment, superlogarithmic)
from treeroute.oracles import oracle_shortest_path
from treeroute.router import InvariantViolation
from treeroute.spanner import build_spanner
from treeroute.tree import build_tree, read_tree


def test_two_vertex_oracle():
    t = build_tree([(0, 1, 2.5)], 0)
    g, _ = build_spanner(t, 4)
    assert oracle_shortest_path(g, 0, 1) == 2.5


def test_n1_path_passes():
    r = run_experiment(ExperimentConfig(generator="path", n=1))
    assert r.failures() == []
    assert r.rows[0]["pairs"] == 0


def test_report_is_deterministic(tmp_path):
    cfg = ExperimentConfig(n=300, k=8, seed=42, pairs=300, out=str(tmp_path / "a.tsv"))
    run_experiment(cfg)
    first = (tmp_path / "a.tsv").read_bytes()
    run_experiment(cfg)
    assert (tmp_path / "a.tsv").read_bytes() == first
    assert first.decode().splitlines()[0].split("\t") == TREE_COLUMNS


def test_report_points_columns():
    r = run_experiment(ExperimentConfig(generator="grid-points", n=64, pairs=100))
    assert r.columns == POINT_COLUMNS and r.failures() == []


def test_timing_column_optional():
    r = run_experiment(ExperimentConfig(n=50, pairs=20, timing=True))
    assert r.columns[-1] == "wall_s"


@pytest.mark.parametrize("field, value", [("n", 0), ("k", 3), ("gamma", 4.0), ("generator", "nope")])
def test_config_validation(field, value):
    cfg = ExperimentConfig(**{field: value})
    with pytest.raises(ValueError):
        run_experiment(cfg)


def test_strict_names_property_and_seed():
    # a base-case complete graph on 34 path vertices exceeds degree Delta + k
    cfg = ExperimentConfig(generator="path", n=500, k=16, seed=9, pairs=50)
    with pytest.raises(InvariantViolation) as exc:
        run_experiment(cfg, strict=True)
    assert "degree" in exc.value.prop and "seed=9" in str(exc.value)


def test_reports_merge_only_with_same_columns():
    a = StatsReport(["x"], [{"x": 1}])
    with pytest.raises(ValueError):
        a.extend(StatsReport(["y"], []))


def test_growth_helpers():
    sizes = [128, 256, 512, 1024]
    assert doubling_ratios(sizes, [4, 5, 6, 7]) == [5 / 4, 6 / 5, 7 / 6]
    assert log_slope(sizes, [4, 5, 6, 7]) == pytest.approx(1.0)
    assert not superlogarithmic(sizes, [4, 5, 6, 7])
    assert superlogarithmic(sizes, [4, 8, 16, 32])


def test_hop_sweep_grows_slowly():
    sizes = [2 ** e for e in range(7, 12)]
    hops = [run_experiment(ExperimentConfig(n=n, k=4, pairs=500, audit_pairs=0)).rows[0]["max_hops"]
            for n in sizes]
    assert log_slope(sizes, hops) <= 4.0
    assert not superlogarithmic(sizes, hops)


# -- command line ------------------------------------------------------------------


def test_cli_pipeline(tmp_path, capsys):
    tree = tmp_path / "t.txt"
    assert main(["gen-tree", "--n", "40", "--seed", "1", "--out", str(tree)]) == 0
    t = read_tree(str(tree))
    assert t.n == 40
    sp, dec, lab = tmp_path / "g.txt", tmp_path / "d.txt", tmp_path / "l.txt"
    assert main(["build", "--tree", str(tree), "--k", "4", "--out", str(sp),
                 "--decomposition", str(dec), "--labels", str(lab)]) == 0
    assert all(ln.split()[3] in "TS" for ln in sp.read_text().splitlines())
    assert dec.read_text().startswith("ε |")
    assert len(lab.read_text().splitlines()) == 40
    assert main(["route", "--tree", str(tree), "--source", "3", "--dest", "30", "--audit"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("0 3 ") and out[-1].split()[1] == "30"


def test_cli_points(tmp_path, capsys):
    pts = tmp_path / "p.txt"
    assert main(["gen-points", "--generator", "grid-points", "--n", "36", "--out", str(pts)]) == 0
    assert main(["build", "--points", str(pts), "--gamma", "8"]) == 0
    assert "light-root" in capsys.readouterr().out
    assert main(["route", "--points", str(pts), "--source", "0", "--dest", "35"]) == 0
    assert capsys.readouterr().out.splitlines()[-1].split()[1] == "35"


def test_cli_verify_exit_codes(capsys):
    assert main(["verify", "--generator", "random-recursive-tree", "--n", "200", "--pairs", "100"]) == 0
    assert main(["verify", "--generator", "path", "--n", "500", "--k", "16", "--seed", "5"]) == 1
    err = capsys.readouterr().err
    assert "degree" in err and "seed=5" in err


def test_cli_report_rows(tmp_path):
    out = tmp_path / "r.tsv"
    main(["report", "--n", "100", "200", "--k", "4", "8", "--pairs", "50", "--out", str(out)])
    assert len(out.read_text().splitlines()) == 5


def test_cli_bad_input(capsys):
    assert main(["gen-tree", "--n", "0"]) == 2
    assert main(["report", "--generator", "path", "grid-points", "--n", "10"]) == 2


def test_cli_verify_criterion(capsys):
    assert main(["verify", "--criterion", "12"]) == 0
    assert capsys.readouterr().out.startswith("criterion 12 [PASS]")


def test_backends_give_identical_reports(tmp_path):
    args = ["-m", "treeroute.cli", "report", "--n", "400", "--k", "4", "--seed", "3", "--pairs", "400"]
    runs = []
    for flag in ("0", "1"):
        env = dict(os.environ, TREEROUTE_NO_NUMBA=flag)
        runs.append(subprocess.run([sys.executable, *args], env=env, capture_output=True, check=True).stdout)
    assert runs[0] == runs[1]


def test_cli_bench(capsys):
    assert main(["bench", "--n", "500", "--pairs", "500", "--repeat", "1"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].split("\t") == ["kernel", "numpy_s", "numba_s", "speedup"]
    assert {r.split("\t")[0] for r in rows[1:]} == {"pair_distances", "route_many", "greedy_net"}
