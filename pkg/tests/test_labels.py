import numpy as np
from hypothesis import given

from treeroute.labels import (IntervalLabel, assign_labels, format_labels, format_views,
                              is_descendant, label_bits_width, label_storage_bits)
from treeroute.oracles import naive_is_ancestor
from treeroute.spanner import build_spanner
from treeroute.tree import build_tree

from strategies import weighted_trees


def views_for(t, k=4):
    g, _ = build_spanner(t, k)
    return g, assign_labels(t, g)


def test_path_labels(path3):
    _, views = views_for(path3)
    assert views[2].label == IntervalLabel(1, 1)
    assert views[1].label == IntervalLabel(1, 2)
    assert views[0].label == IntervalLabel(1, 3)


def test_root_label_spans_everything(rrt):
    t = rrt(300, 0)
    _, views = views_for(t)
    assert views[t.root].label == IntervalLabel(1, 300)


def test_is_descendant_examples(path3):
    _, views = views_for(path3)
    assert is_descendant(views[1].label, views[1].label)
    assert is_descendant(views[2].label, views[0].label)
    assert not is_descendant(views[0].label, views[2].label)


def test_is_descendant_exhaustive(rrt):
    t = rrt(300, 1)
    _, views = views_for(t)
    labels = [views[v].label for v in range(t.n)]
    for w in range(t.n):
        for v in range(t.n):
            assert is_descendant(labels[w], labels[v]) == naive_is_ancestor(t, v, w)


def test_bits_single_vertex():
    t = build_tree([], 0)
    _, views = views_for(t)
    assert label_storage_bits(views) == {0: 2}


def test_bits_path(path3):
    # vertex 1 of a 3-path: complete base-case graph gives it 2 neighbours
    _, views = views_for(path3)
    assert label_storage_bits(views)[1] == 12


def test_bits_width():
    assert [label_bits_width(n) for n in (1, 2, 3, 4, 7, 8, 1000)] == [1, 2, 2, 3, 3, 4, 10]


def test_bits_random_tree_degree_form(rrt):
    t = rrt(1000, 2)
    g, views = views_for(t)
    bits = label_storage_bits(views)
    deg = g.degrees()
    assert all(bits[v] == 2 * 10 * (1 + deg[v]) for v in range(t.n))


def test_views_mirror_adjacency(rrt):
    t = rrt(200, 3)
    g, views = views_for(t)
    for v in range(t.n):
        nb = views[v].neighbours
        assert sorted(x.vertex for x in nb) == sorted(g.nbr[g.ptr[v]:g.ptr[v + 1]].tolist())
        for x in nb:
            if x.relation == "parent":
                assert t.parent[v] == x.vertex
            elif x.relation == "child":
                assert t.parent[x.vertex] == v
            else:
                assert t.parent[v] != x.vertex and t.parent[x.vertex] != v


def test_dumps(path3):
    _, views = views_for(path3)
    assert format_labels(views) == "0 1 3\n1 1 2\n2 1 1\n"
    assert format_views(views).splitlines()[0].startswith("0 | (1,1,2,1.5,child)")


@given(weighted_trees(max_n=50))
def test_laminar(t):
    _, views = views_for(t)
    labs = [views[v].label for v in range(t.n)]
    for a in labs:
        assert 1 <= a.low <= a.rank <= t.n
        for b in labs:
            disjoint = a.rank < b.low or b.rank < a.low
            nested = (a.low <= b.low and b.rank <= a.rank) or (b.low <= a.low and a.rank <= b.rank)
            assert disjoint or nested


@given(weighted_trees(max_n=50))
def test_ranks_match_post_order(t):
    _, views = views_for(t)
    ranks = np.array([views[v].label.rank for v in range(t.n)])
    assert sorted(ranks.tolist()) == list(range(1, t.n + 1))
