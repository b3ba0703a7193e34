"""Interval routing labels and the per-vertex local views built from them."""

from dataclasses import dataclass
import io
from typing import NamedTuple

import numpy as np

from .kernels import REL_CHILD, REL_PARENT, REL_SHORTCUT
from .spanner import TREE

RELATIONS = ("parent", "child", "shortcut")


class IntervalLabel(NamedTuple):
    low: int
    rank: int


class Neighbour(NamedTuple):
    vertex: int
    label: IntervalLabel
    weight: float
    relation: str


@dataclass(frozen=True)
class LocalView:
    """Everything a vertex may read when it forwards a message."""

    vertex: int
    label: IntervalLabel
    neighbours: tuple

    @property
    def degree(self):
        return len(self.neighbours)


def is_descendant(w, v):
    """``w`` lies in the subtree of ``v`` (reflexive)."""
    return v.low <= w.rank <= v.rank


def relation_codes(t, g):
    """Per adjacency slot of ``g``: parent, child or shortcut."""
    src = np.repeat(np.arange(g.n), np.diff(g.ptr))
    rel = np.full(g.nbr.shape[0], REL_SHORTCUT, dtype=np.int64)
    tree = g.kind == TREE
    is_parent = tree & (t.parent[src] == g.nbr)
    rel[is_parent] = REL_PARENT
    rel[tree & ~is_parent] = REL_CHILD
    return rel


def assign_labels(t, g):
    """Label every vertex with ``[L(v), rank(v)]`` and copy its neighbours' labels."""
    low = t.low.tolist()
    rank = t.rank.tolist()
    rel = relation_codes(t, g).tolist()
    nbr = g.nbr.tolist()
    wt = g.wt.tolist()
    ptr = g.ptr.tolist()
    views = {}
    for v in range(t.n):
        nb = tuple(
            Neighbour(nbr[j], IntervalLabel(low[nbr[j]], rank[nbr[j]]), wt[j], RELATIONS[rel[j]])
            for j in range(ptr[v], ptr[v + 1])
        )
        views[v] = LocalView(v, IntervalLabel(low[v], rank[v]), nb)
    return views


def label_bits_width(n):
    """Bits per label integer, ``ceil(log2(n + 1))``."""
    return max(1, int(n).bit_length())


def label_storage_bits(views):
    """Idealised bits stored per vertex: two integers for itself and each neighbour."""
    w = label_bits_width(len(views))
    return {v: 2 * w * (1 + view.degree) for v, view in views.items()}


def format_labels(views, names=None):
    name = (lambda v: v) if names is None else (lambda v: names[v])
    out = io.StringIO()
    for v in sorted(views):
        lab = views[v].label
        out.write(f"{name(v)} {lab.low} {lab.rank}\n")
    return out.getvalue()


def format_views(views, names=None):
    name = (lambda v: v) if names is None else (lambda v: names[v])
    out = io.StringIO()
    for v in sorted(views):
        parts = " ".join(
            f"({name(nb.vertex)},{nb.label.low},{nb.label.rank},{nb.weight:.17g},{nb.relation})"
            for nb in views[v].neighbours
        )
        out.write(f"{name(v)} | {parts}\n".rstrip() + "\n")
    return out.getvalue()
