"""Tree-metric 1-spanners with local interval routing, and a net-tree
extension to doubling metrics."""

from .tree import (CycleError, DisconnectedError, DuplicateEdgeError, RootedTree, TreeError,
                   UnknownVertexError, WeightError, build_tree, lca, parse_tree, read_tree,
                   tree_distance, write_tree)
from .spanner import (CanonicalDecomposition, SpannerGraph, build_spanner, canonical_sequence,
                      cut_vertices, first_balanced_on_leftmost_path)
from .labels import IntervalLabel, LocalView, assign_labels, is_descendant, label_storage_bits
from .router import (InvariantViolation, RouteAudit, RouteTrace, RoutingError, decide, hop_bound,
                     hop_budget, route_many, routing_tables, simulate)
from .doubling import (ExactLabeling, NetTree, PointMetric, build_doubling_spanner,
                       build_net_hierarchy, build_net_tree, cross_edge_target_interval,
                       route_doubling)
from .harness import ExperimentConfig, StatsReport, run_experiment

__version__ = "0.1.0"
