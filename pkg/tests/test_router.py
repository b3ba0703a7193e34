import numpy as np
import pytest
from hypothesis import given, strategies as st

from treeroute import checks
from treeroute.generators import TREE_GENERATORS, make_tree, rng_for, sample_pairs
from treeroute.labels import IntervalLabel, LocalView, Neighbour, assign_labels
from treeroute.router import (RouteAudit, RoutingError, decide, hop_bound, hop_budget,
                              route_many, routing_tables, simulate)
from treeroute.spanner import build_spanner
from treeroute.tree import build_tree, tree_distance

from strategies import weighted_trees


def setup(t, k=4):
    g, dec = build_spanner(t, k)
    return g, dec, assign_labels(t, g), RouteAudit(t, g, dec)


def test_adjacent_is_case_0(path3):
    _, _, views, _ = setup(path3)
    tr = simulate(views, 0, 1)
    assert tr.hops == [0, 1] and tr.cases == ["0"] and tr.total_weight == 1.5


def test_base_case_graph_is_one_hop():
    t = build_tree([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 0)
    _, _, views, _ = setup(t, 16)
    for u in range(4):
        for v in range(4):
            if u != v:
                assert simulate(views, u, v).hop_count == 1


def test_star_leaf_to_leaf(star5):
    _, _, views, audit = setup(star5)
    for u in range(1, 6):
        for v in range(1, 6):
            if u != v:
                tr = simulate(views, u, v, audit=audit)
                assert tr.total_weight == 2.0 and tr.hop_count in (1, 2)


def test_decide_rejects_self(path3):
    _, _, views, _ = setup(path3)
    with pytest.raises(ValueError):
        decide(views[0], views[0].label)


def test_decide_cases():
    # 0 - 1 - 2 - ... - 11 chain plus a branch; only tree edges in the views
    view = LocalView(5, IntervalLabel(1, 5), (
        Neighbour(6, IntervalLabel(1, 6), 1.0, "parent"),
        Neighbour(4, IntervalLabel(1, 4), 1.0, "child"),
    ))
    assert decide(view, IntervalLabel(1, 2)).case == "1"
    assert decide(view, IntervalLabel(1, 2)).hops == (4,)
    assert decide(view, IntervalLabel(1, 9)).case == "2"
    assert decide(view, IntervalLabel(7, 7)).case == "3a"
    assert decide(view, IntervalLabel(1, 4)).case == "0"


def test_no_viable_neighbour():
    view = LocalView(0, IntervalLabel(1, 1), ())
    with pytest.raises(RoutingError):
        decide(view, IntervalLabel(2, 2))


def test_no_viable_neighbour_surfaces_trace():
    views = {
        0: LocalView(0, IntervalLabel(1, 1), (Neighbour(1, IntervalLabel(1, 2), 1.0, "parent"),)),
        1: LocalView(1, IntervalLabel(1, 2), ()),
        2: LocalView(2, IntervalLabel(3, 3), ()),
    }
    with pytest.raises(RoutingError) as exc:
        simulate(views, 0, 2)
    assert exc.value.trace.hops == [0, 1]


def test_budget_exceeded(rrt):
    t = rrt(500, 0)
    _, _, views, _ = setup(t)
    u, v = 0, int(t.leftmost[t.root])
    full = simulate(views, u, v)
    with pytest.raises(RoutingError):
        simulate(views, u, v, max_hops=full.hop_count - 1)


def test_budget_constants():
    assert hop_budget(3) == 64 and hop_bound(3) == 28


def test_trace_format(path3):
    _, _, views, _ = setup(path3)
    lines = simulate(views, 2, 0).format().splitlines()
    assert lines[0] == "0 2 - 0 0"
    assert lines[-1].split()[1] == "0"
    assert float(lines[-1].split()[-1]) == 4.0


@pytest.mark.parametrize("k", [4, 8])
def test_all_pairs_audited(rrt, k):
    t = rrt(150, 9)
    _, dec, views, audit = setup(t, k)
    for u in range(t.n):
        for v in range(t.n):
            if u == v:
                continue
            tr = simulate(views, u, v, audit=audit)
            assert checks.close(tr.total_weight, tree_distance(t, u, v))
            assert tr.hop_count <= hop_bound(dec.max_sequence_length())


@pytest.mark.parametrize("gen", TREE_GENERATORS)
def test_shapes_audited(gen):
    t = make_tree(gen, 300, 2)
    _, _, views, audit = setup(t)
    src, dst = sample_pairs(t.n, 400, rng_for(1))
    for u, v in zip(src.tolist(), dst.tolist()):
        tr = simulate(views, u, v, audit=audit)
        assert checks.close(tr.total_weight, tree_distance(t, u, v))


@pytest.mark.parametrize("n", [100, 500, 2000])
@pytest.mark.parametrize("k", [4, 8])
def test_batch_exact_and_bounded(rrt, n, k):
    t = rrt(n, 0)
    g, dec = build_spanner(t, k)
    src, dst = sample_pairs(n, 2000, rng_for(0))
    K = dec.max_sequence_length()
    res = route_many(routing_tables(t, g), src, dst, hop_budget(K))
    assert (res.status == 0).all()
    assert checks.route_exactness(t, src, dst, res.weight) == 0
    assert checks.route_subsequence(t, src, dst, res) == 0
    assert res.hops.max() <= hop_bound(K)


def test_batch_matches_simulator(rrt):
    t = rrt(400, 5)
    g, dec = build_spanner(t, 4)
    views = assign_labels(t, g)
    src, dst = sample_pairs(t.n, 300, rng_for(2))
    res = route_many(routing_tables(t, g), src, dst, hop_budget(dec.max_sequence_length()))
    for i, (u, v) in enumerate(zip(src.tolist(), dst.tolist())):
        tr = simulate(views, u, v)
        assert res.path(i) == tr.hops
        assert res.case_names(i) == tr.cases
        assert res.weight[i] == pytest.approx(tr.total_weight, rel=1e-12)


@given(weighted_trees(min_n=2, max_n=70), st.sampled_from([4, 6, 8]), st.data())
def test_routes_audited(t, k, data):
    _, _, views, audit = setup(t, k)
    u = data.draw(st.integers(0, t.n - 1))
    v = data.draw(st.integers(0, t.n - 1).filter(lambda x: x != u))
    tr = simulate(views, u, v, audit=audit)
    assert checks.close(tr.total_weight, tree_distance(t, u, v))
    steps = list(zip(tr.hops, tr.hops[1:]))
    assert all(views[a].neighbours and any(nb.vertex == b for nb in views[a].neighbours) for a, b in steps)
