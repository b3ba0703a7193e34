"""Local routing on the tree-metric spanner.

``decide`` sees one :class:`~treeroute.labels.LocalView` and the destination
label, nothing else. ``simulate`` forwards a message hop by hop, calling
``decide`` afresh at every vertex: the header carries no routing state.

Among ancestors of a fixed vertex, deeper means a smaller post-order rank
(equivalently a smaller nested interval), so "deepest"/"highest" are plain
rank comparisons.
"""

from dataclasses import dataclass, field
import io
from typing import NamedTuple

import numpy as np

from . import kernels
from .kernels import CASE_NAMES
from .labels import IntervalLabel, is_descendant, relation_codes


class RoutingError(RuntimeError):
    """The router could not make progress; ``trace`` holds the hops so far."""

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


class InvariantViolation(AssertionError):
    """A checked property failed. ``prop`` names it."""

    def __init__(self, prop, detail=""):
        super().__init__(f"{prop}: {detail}" if detail else prop)
        self.prop = prop
        self.detail = detail


class MessageHeader(NamedTuple):
    destination: IntervalLabel
    dest_vertex: int  # trace bookkeeping only; decisions never read it


class Decision(NamedTuple):
    """One routing step.

    ``hops`` is the executable part of the plan. ``then`` names the second
    step of the two-step case ('parent' or 'toward-dest'), which the next
    vertex recomputes from its own view; ``None`` when the plan is complete.
    """

    hops: tuple
    case: str
    then: object = None


@dataclass
class RouteTrace:
    hops: list
    weights: list = field(default_factory=list)
    cases: list = field(default_factory=list)
    divergences: int = 0

    @property
    def hop_count(self):
        return len(self.hops) - 1

    @property
    def total_weight(self):
        return float(sum(self.weights))

    def format(self, names=None):
        name = (lambda v: v) if names is None else (lambda v: names[v])
        out = io.StringIO()
        cum = 0.0
        out.write(f"0 {name(self.hops[0])} - 0 0\n")
        for i, (v, c, w) in enumerate(zip(self.hops[1:], self.cases, self.weights), start=1):
            cum += w
            out.write(f"{i} {name(v)} {c} {w:.17g} {cum:.17g}\n")
        return out.getvalue()


def _anc(a, b):
    """``a`` is an ancestor of ``b`` (labels)."""
    return a.low <= b.rank <= a.rank


def decide(view, dest):
    """Pick the next hop from ``view`` toward the vertex labelled ``dest``."""
    me = view.label
    if me == dest:
        raise ValueError("already at the destination")
    nbs = view.neighbours
    for nb in nbs:
        if nb.label == dest:
            return Decision((nb.vertex,), "0")
    if _anc(me, dest):
        cand = [nb for nb in nbs if _anc(nb.label, dest)]
        if cand:
            x = min(cand, key=lambda nb: nb.label.rank)
            return Decision((x.vertex,), "1", "toward-dest")
    elif _anc(dest, me):
        cand = [nb for nb in nbs if _anc(nb.label, me) and _anc(dest, nb.label)]
        if cand:
            x = max(cand, key=lambda nb: nb.label.rank)
            return Decision((x.vertex,), "2", "parent")
    else:
        cand = [nb for nb in nbs if _anc(nb.label, dest) and not _anc(nb.label, me)]
        if cand:
            x = min(cand, key=lambda nb: nb.label.rank)
            return Decision((x.vertex,), "3b", "toward-dest")
        cand = [nb for nb in nbs if _anc(nb.label, me) and not _anc(nb.label, dest)]
        if cand:
            y = max(cand, key=lambda nb: nb.label.rank)
            return Decision((y.vertex,), "3a", "parent")
        for nb in nbs:
            if nb.relation == "parent":
                return Decision((nb.vertex,), "3a")
    raise RoutingError(f"vertex {view.vertex} has no viable neighbour toward {dest}")


def hop_budget(k_max):
    """Abort threshold for a single route, ``16K + 16``."""
    return 16 * int(k_max) + 16


def hop_bound(k_max):
    """Expected worst-case hop count, ``8K + 4``."""
    return 8 * int(k_max) + 4


def simulate(views, source, dest, *, audit=None, max_hops=None):
    """Forward a message from ``source`` to ``dest`` using only local views.

    With an :class:`RouteAudit`, every decision is cross-checked against the
    decomposition and tree (test mode); the router itself never reads them.
    """
    if source == dest:
        raise ValueError("source and destination coincide")
    if source not in views or dest not in views:
        raise KeyError(source if source not in views else dest)
    header = MessageHeader(views[dest].label, dest)
    if max_hops is None:
        max_hops = hop_budget(audit.k_max) if audit is not None else len(views)
    trace = RouteTrace([source])
    u = source
    pending = None
    while u != header.dest_vertex:
        if trace.hop_count >= max_hops:
            raise RoutingError(f"hop budget {max_hops} exceeded", trace)
        view = views[u]
        try:
            dec = decide(view, header.destination)
        except RoutingError as exc:
            exc.trace = trace
            raise
        nxt = dec.hops[0]
        if audit is not None:
            if pending is not None and pending != nxt:
                trace.divergences += 1
            pending = audit.check_decision(views, u, dest, dec)
        w = next(nb.weight for nb in view.neighbours if nb.vertex == nxt)
        trace.hops.append(nxt)
        trace.weights.append(w)
        trace.cases.append(dec.case)
        u = nxt
    if audit is not None:
        audit.check_trace(trace, source, dest)
    return trace


class RouteAudit:
    """Test-mode oracle built from the tree and decomposition."""

    def __init__(self, t, g, dec):
        self.t = t
        self.g = g
        self.dec = dec
        self.k_max = dec.max_sequence_length()
        self._cut = [set(int(c) for c in s.cut) for s in dec.subtrees]

    def _anc(self, a, b):
        return self.t.is_ancestor(a, b)

    def _toward(self, x, v):
        return self.t.ancestor_at_depth(v, int(self.t.depth[x]) + 1)

    def plan(self, u, v):
        """The two-step plan with the cut set of u's canonical subtree: ``(case, x, second)``."""
        t = self.t
        if self.g.has_edge(u, v):
            return "0", v, None
        cut = self.dec.subtrees[self.dec.owner[u]].cut.tolist()
        depth = t.depth
        if self._anc(u, v):
            x = max((c for c in cut if self._anc(c, v)), key=lambda c: depth[c])
            return "1", x, self._toward(x, v)
        if self._anc(v, u):
            x = min((c for c in cut if self._anc(c, u) and self._anc(v, c)), key=lambda c: depth[c])
            return "2", x, int(t.parent[x])
        xs = [c for c in cut if self._anc(c, v) and not self._anc(c, u)]
        if xs:
            x = max(xs, key=lambda c: depth[c])
            return "3b", x, self._toward(x, v)
        y = min((c for c in cut if self._anc(c, u) and not self._anc(c, v)), key=lambda c: depth[c])
        return "3a", y, int(t.parent[y])

    def seq(self, v):
        return self.dec.subtrees[self.dec.owner[v]].sequence

    def check_decision(self, views, u, v, dec):
        case, x, second = self.plan(u, v)
        expect = x if x != u else second
        if dec.case != case or dec.hops[0] != expect:
            raise InvariantViolation(
                "local decision matches cut-set plan",
                f"u={u} v={v}: got case {dec.case} hop {dec.hops[0]}, expected case {case} hop {expect}",
            )
        if case in ("1", "2"):
            self._check_sequences(u, v, second)
        if case == "3a":
            a = int(self.t.lca_many([u], [v])[0])
            if not self.g.has_edge(u, a):
                alt = decide(views[u], views[a].label)
                if alt.hops != dec.hops:
                    raise InvariantViolation(
                        "case 3a equals routing to lca", f"u={u} v={v} lca={a}: {alt.hops} vs {dec.hops}")
        return second if x != u else None

    def _check_sequences(self, u, v, u2):
        su, sv, s2 = self.seq(u), self.seq(v), self.seq(u2)

        def prefix(a, b):
            return len(a) <= len(b) and b[:len(a)] == a

        ok = True
        if prefix(su, sv) and su != sv:
            ok = len(s2) > len(su) and prefix(s2, sv)
        elif prefix(sv, su) and su != sv:
            ok = len(s2) < len(su) and prefix(sv, s2)
        elif su != sv:
            m = 0
            while su[m] == sv[m]:
                m += 1
            ok = len(s2) < len(su) and prefix(su[:m], s2)
        if not ok:
            raise InvariantViolation(
                "canonical-sequence progress", f"u={u} v={v} u'={u2}: {su} {sv} -> {s2}")

    def check_trace(self, trace, source, dest):
        path = self.t.path(source, dest)
        where = {x: i for i, x in enumerate(path)}
        last = -1
        for h in trace.hops:
            i = where.get(h)
            if i is None or i <= last:
                raise InvariantViolation("hops are an in-order subsequence of the tree path",
                                         f"{source}->{dest}: {trace.hops}")
            last = i
        seen_anc = False
        for h in trace.hops:
            a = self._anc(h, dest)
            if seen_anc and not a:
                raise InvariantViolation("ancestor phase is monotone", f"{source}->{dest}: {trace.hops}")
            seen_anc = seen_anc or a


# -- batch routing over flat tables ----------------------------------------------


class RoutingTables(NamedTuple):
    low: np.ndarray
    rank: np.ndarray
    ptr: np.ndarray
    nbr: np.ndarray
    wt: np.ndarray
    rel: np.ndarray


def routing_tables(t, g):
    """Array form of all local views, for the batch kernel."""
    return RoutingTables(t.low, t.rank, g.ptr, g.nbr, g.wt, relation_codes(t, g))


class BatchResult(NamedTuple):
    hops: np.ndarray
    weight: np.ndarray
    status: np.ndarray
    paths: np.ndarray
    cases: np.ndarray

    def path(self, i):
        return self.paths[i, :self.hops[i] + 1].tolist()

    def case_names(self, i):
        return [CASE_NAMES[c] for c in self.cases[i, :self.hops[i]]]


def route_many(tables, sources, dests, budget, use_numba=None):
    """Route many pairs at once with the same rule as :func:`decide`."""
    return BatchResult(*kernels.route_many(*tables, sources, dests, budget, use_numba=use_numba))
