"""Reply-graph analytics for forum message logs: structural, temporal and
semantic node metrics, node-removal robustness experiments, spammer detection
and moderator fingerprinting."""

__version__ = "0.1.0"

from .experiments import (
    RemovalStrategy,
    analyze,
    apply_removal,
    filter_events,
    select_removal_set,
    stability_analysis,
)
from .graph import ForumGraph, betweenness, build_graph, connected_components, shortest_path_lengths
from .ingest import MessageEvent, Roster, parse_message_log, parse_roster
from .nodemetrics import MetricConfig, compute_node_metrics
from .roles import detect_spammers, moderator_fingerprint, rank_moderator_candidates
from .stats import pearson, welch_t_test
from .structural import network_summary, node_centralities
from .synthgen import SynthConfig, generate_forum

__all__ = [
    "ForumGraph",
    "MessageEvent",
    "MetricConfig",
    "RemovalStrategy",
    "Roster",
    "SynthConfig",
    "analyze",
    "apply_removal",
    "betweenness",
    "build_graph",
    "compute_node_metrics",
    "connected_components",
    "detect_spammers",
    "filter_events",
    "generate_forum",
    "moderator_fingerprint",
    "network_summary",
    "node_centralities",
    "parse_message_log",
    "parse_roster",
    "pearson",
    "rank_moderator_candidates",
    "select_removal_set",
    "shortest_path_lengths",
    "stability_analysis",
    "welch_t_test",
]
