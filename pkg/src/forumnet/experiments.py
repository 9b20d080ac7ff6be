"""Node-removal strategies and the robustness / stability analysis.

All strategies select their nodes once, on the original graph, and remove
them in a single step. After removal, structural metrics are recomputed on
the reduced graph and message-derived metrics on the messages that neither
come from nor answer a removed author.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import pandas as pd

from .graph import ForumGraph, build_graph, parent_lookup, subgraph_without
from .ingest import MessageEvent, Roster
from .nodemetrics import MetricConfig, compute_node_metrics
from .stats import Correlation, pearson
from .structural import NetworkSummary, network_summary

logger = logging.getLogger(__name__)

KINDS = ("none", "top", "bottom", "moderators", "spammers")
PAPER_STRATEGIES = (
    "top1", "top1+bottom", "top5", "top10", "bottom",
    "moderators", "moderators+bottom", "spammers", "spammers+bottom", "moderators+spammers",
)
# Table-2 row order
STABILITY_METRICS = (
    "alter_art",
    "ego_art",
    "alter_nudges",
    "ego_nudges",
    "activity",
    "contribution_index",
    "betweenness",
    "betweenness_oscillations",
    "closeness",
    "degree",
    "sentiment",
    "emotionality",
    "complexity",
)


class StrategyError(ValueError):
    pass


def _fmt_percent(p: float) -> str:
    return f"{p * 100:g}"


@dataclass(frozen=True)
class RemovalStrategy:
    """Union of selection rules; ``("top", 0.01)`` is the top percentile by degree."""

    parts: tuple

    def __post_init__(self):
        kinds = [p[0] for p in self.parts]
        if not kinds:
            raise StrategyError("empty strategy")
        if len(set(kinds)) != len(kinds):
            raise StrategyError(f"strategy repeats a selection kind: {kinds}")
        for part in self.parts:
            if part[0] not in KINDS:
                raise StrategyError(f"unknown selection kind {part[0]!r}")
            if part[0] == "top" and not 0 < part[1] < 1:
                raise StrategyError(f"top fraction must lie in (0, 1), got {part[1]}")

    @classmethod
    def parse(cls, token: str) -> "RemovalStrategy":
        parts = []
        for piece in token.strip().lower().split("+"):
            piece = piece.strip()
            if piece.startswith("top"):
                try:
                    pct = float(piece[3:])
                except ValueError:
                    raise StrategyError(f"bad strategy token {piece!r}; use e.g. top1, top5, top10") from None
                parts.append(("top", pct / 100.0))
            elif piece in ("bottom", "moderators", "spammers", "none"):
                parts.append((piece,))
            else:
                raise StrategyError(
                    f"unknown strategy token {piece!r}; valid tokens: none, topN (N in percent), "
                    "bottom, moderators, spammers, joined with '+'"
                )
        return cls(tuple(parts))

    @property
    def label(self) -> str:
        return "+".join(f"top{_fmt_percent(p[1])}" if p[0] == "top" else p[0] for p in self.parts)

    @property
    def needs(self) -> set:
        return {p[0] for p in self.parts} & {"moderators", "spammers"}

    def __str__(self):
        return self.label


def top_count(p: float, n: int) -> int:
    # round first so that e.g. 0.07 * 100 does not become 8
    return math.ceil(round(p * n, 9))


def select_removal_set(
    graph: ForumGraph,
    strategy: RemovalStrategy,
    roster: Optional[Roster] = None,
    spammers: Optional[Iterable[str]] = None,
) -> set[str]:
    """Nodes removed by ``strategy``; selection always uses the original graph.

    ``spammers`` (e.g. from :func:`forumnet.roles.detect_spammers`) takes
    precedence over the roster's spammer labels.
    """
    degree = graph.degree()
    chosen: set[str] = set()
    for part in strategy.parts:
        kind = part[0]
        if kind == "top":
            k = top_count(part[1], graph.n)
            ranked = sorted(graph.nodes, key=lambda v: (-degree[v], v))
            chosen.update(ranked[:k])
        elif kind == "bottom":
            chosen.update(v for v in graph.nodes if degree[v] <= 1)
        elif kind == "moderators":
            labels = roster.moderators if roster is not None else set()
            if not labels:
                raise StrategyError(f"strategy {strategy} needs moderator labels (roster)")
            chosen.update(v for v in labels if v in graph)
        elif kind == "spammers":
            labels = set(spammers) if spammers is not None else (roster.spammers if roster else set())
            if not labels:
                raise StrategyError(f"strategy {strategy} needs spammer labels (roster or detection)")
            chosen.update(v for v in labels if v in graph)
    return chosen


def apply_removal(graph: ForumGraph, removed: Iterable[str]) -> ForumGraph:
    return subgraph_without(graph, removed)


def filter_events(events: Sequence[MessageEvent], removed: Iterable[str]) -> list[MessageEvent]:
    """Messages whose author survives and, for replies, whose parent's author survives."""
    removed = set(removed)
    if not removed:
        return list(events)
    lookup = parent_lookup(events, None)
    kept = []
    for ev in events:
        if ev.author_id in removed:
            continue
        if ev.parent_id is not None:
            parent = lookup.get(ev.parent_id)
            if parent is not None and parent.author_id in removed:
                continue
        kept.append(ev)
    return kept


@dataclass
class Analysis:
    """Full metric pass over one corpus."""

    events: list[MessageEvent]
    graph: ForumGraph
    metrics: pd.DataFrame
    summary: NetworkSummary
    config: MetricConfig


def analyze(events: Sequence[MessageEvent], config: MetricConfig = MetricConfig()) -> Analysis:
    events = list(events)
    if events and config.window_start is None:
        # fix the oscillation grid so reduced corpora reuse it
        config = replace(
            config,
            window_start=min(ev.timestamp for ev in events),
            window_end=max(ev.timestamp for ev in events),
        )
    graph = build_graph(events)
    metrics = compute_node_metrics(events, graph, config)
    return Analysis(events, graph, metrics, network_summary(graph, config.direction), config)


@dataclass
class StabilityReport:
    strategy: str
    removed_count: int
    removed_pct: float
    before: NetworkSummary
    after: NetworkSummary
    correlations: dict[str, Correlation] = field(default_factory=dict)
    removed: frozenset = frozenset()

    def r(self, metric: str) -> Optional[float]:
        return self.correlations[metric].r


def correlate_tables(before: pd.DataFrame, after: pd.DataFrame, metrics=STABILITY_METRICS) -> dict[str, Correlation]:
    """Per-metric Pearson correlation over the nodes present in ``after``."""
    base = before.reindex(after.index)
    out = {}
    for m in metrics:
        try:
            out[m] = pearson(base[m].tolist(), after[m].tolist())
        except Exception as exc:  # one bad metric must not sink the report
            logger.warning("correlation for %s failed: %s", m, exc)
            out[m] = Correlation(None, None, 0, f"error: {exc}")
    return out


def run_strategy(
    analysis: Analysis,
    strategy: RemovalStrategy,
    roster: Optional[Roster] = None,
    spammers: Optional[Iterable[str]] = None,
) -> StabilityReport:
    removed = select_removal_set(analysis.graph, strategy, roster, spammers)
    reduced = apply_removal(analysis.graph, removed)
    kept = filter_events(analysis.events, removed)
    after = compute_node_metrics(kept, reduced, analysis.config, context=analysis.events)
    n = analysis.graph.n
    report = StabilityReport(
        strategy=strategy.label,
        removed_count=n - reduced.n,
        removed_pct=(n - reduced.n) / n if n else 0.0,
        before=analysis.summary,
        after=network_summary(reduced, analysis.config.direction),
        correlations=correlate_tables(analysis.metrics, after),
        removed=frozenset(removed),
    )
    logger.info("%s: removed %d nodes", strategy.label, report.removed_count)
    return report


def _run_star(args):
    return run_strategy(*args)


def stability_analysis(
    analysis: Analysis,
    strategies: Sequence,
    roster: Optional[Roster] = None,
    spammers: Optional[Iterable[str]] = None,
    workers: int = 1,
) -> list[StabilityReport]:
    """Run every strategy against the original corpus, in the given order."""
    strategies = [s if isinstance(s, RemovalStrategy) else RemovalStrategy.parse(s) for s in strategies]
    spammers = None if spammers is None else frozenset(spammers)
    # fail early on label-dependent strategies without labels
    for s in strategies:
        select_removal_set(analysis.graph, s, roster, spammers)
    jobs = [(analysis, s, roster, spammers) for s in strategies]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_star, jobs))
    return [run_strategy(*job) for job in jobs]
