"""Hypothesis strategies for trees and point sets."""

from hypothesis import strategies as st

from treeroute.tree import build_tree


@st.composite
def weighted_trees(draw, min_n=1, max_n=60):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    weights = draw(st.lists(st.floats(0.01, 10.0), min_size=n - 1, max_size=n - 1))
    return build_tree([(i + 1, p, w) for i, (p, w) in enumerate(zip(parents, weights))], 0)


@st.composite
def point_sets(draw, min_n=2, max_n=40):
    n = draw(st.integers(min_n, max_n))
    xs = st.integers(0, 200_000_000).map(lambda i: i / 1e6)
    pts = draw(st.lists(st.tuples(xs, xs), min_size=n, max_size=n, unique=True))
    return pts
