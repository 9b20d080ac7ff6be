"""Spammer detection and moderator fingerprinting."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .graph import ForumGraph
from .ingest import MessageEvent
from .nodemetrics import NODE_METRICS, zscore_columns
from .stats import welch_t_test

logger = logging.getLogger(__name__)

SPAM_CI_THRESHOLD = 0.7

# moderators score high on these and low on the second group
HIGHER = ("betweenness", "betweenness_oscillations", "degree", "sent", "received", "alter_nudges", "complexity")
LOWER = ("emotionality", "contribution_index", "ego_nudges")

FINGERPRINT_METRICS = NODE_METRICS


class SpamDetectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpamVerdict:
    conditions: frozenset  # subset of {"a", "b", "c"}
    is_spammer: bool
    ci_consistent: bool  # contribution index above 0.7


def spam_content(events: Sequence[MessageEvent]) -> dict[str, bool]:
    """Condition (c): at least half of an author's labelled messages are spam."""
    labelled: dict[str, list[bool]] = {}
    for ev in events:
        if ev.spam_label is not None:
            labelled.setdefault(ev.author_id, []).append(ev.spam_label)
    return {a: 2 * sum(flags) >= len(flags) for a, flags in labelled.items()}


def detect_spammers(
    graph: ForumGraph,
    metrics: pd.DataFrame,
    events: Sequence[MessageEvent],
    activity_percentile: float = 0.99,
    max_nonspam_answers: int = 1,
) -> dict[str, SpamVerdict]:
    """Flag authors meeting at least two of: (a) activity at or above the
    given percentile, (b) at most ``max_nonspam_answers`` replies received
    from non-spammers, (c) spam content.

    Condition (b) depends on who the spammers are, so the spammer set is
    iterated to a fixed point starting from the nodes that qualify without
    it (or with all answers counted).
    """
    nodes = list(graph.nodes)
    activity = metrics["activity"].reindex(nodes).fillna(0)
    threshold = float(np.quantile(activity.to_numpy(), activity_percentile)) if nodes else 0.0
    cond_a = {v for v in nodes if activity[v] >= threshold}
    content = spam_content(events)
    cond_c = {v for v in nodes if content.get(v, False)}
    incoming: dict[str, list[tuple[str, int]]] = {v: [] for v in nodes}
    for (u, v), w in graph.arcs.items():
        incoming[v].append((u, w))

    def cond_b(spammers: set) -> set:
        return {
            v for v in nodes
            if sum(w for u, w in incoming[v] if u not in spammers) <= max_nonspam_answers
        }

    b_all = cond_b(set())
    spammers = (cond_a & cond_c) | (cond_c & b_all)
    previous: set = set()
    for _ in range(max(len(nodes), 1)):
        b = cond_b(spammers)
        nxt = {v for v in nodes if (v in cond_a) + (v in b) + (v in cond_c) >= 2}
        if nxt == spammers:
            break
        previous, spammers = spammers, nxt
    else:
        raise SpamDetectionError(
            f"spammer set did not converge; oscillating nodes: {sorted(spammers ^ previous)}"
        )

    b = cond_b(spammers)
    ci = metrics["contribution_index"].reindex(nodes)
    verdicts = {}
    for v in nodes:
        conds = frozenset(k for k, s in (("a", cond_a), ("b", b), ("c", cond_c)) if v in s)
        consistent = bool(ci[v] > SPAM_CI_THRESHOLD) if not math.isnan(ci[v]) else False
        verdicts[v] = SpamVerdict(conds, v in spammers, consistent)
        if v in spammers and not consistent:
            logger.warning("detected spammer %s has contribution index %.3f (expected > 0.7)", v, ci[v])
    return verdicts


@dataclass(frozen=True)
class FingerprintRow:
    metric: str
    n_mod: int
    n_other: int
    mod_mean: Optional[float] = None
    other_mean: Optional[float] = None
    t: Optional[float] = None
    df: Optional[float] = None
    p: Optional[float] = None
    degenerate: bool = False

    @property
    def tested(self) -> bool:
        return self.p is not None

    @property
    def significant(self) -> bool:
        return self.tested and self.p < 0.05

    @property
    def direction(self) -> str:
        if not self.tested:
            return ""
        diff = self.mod_mean - self.other_mean
        return "higher" if diff > 0 else "lower" if diff < 0 else "equal"


def moderator_fingerprint(metrics: pd.DataFrame, moderators, metric_names=FINGERPRINT_METRICS) -> list[FingerprintRow]:
    """Welch t-test of moderators against everyone else, one row per metric.

    Nodes missing a metric sit out that metric's test. With fewer than two
    values on either side the row is left untested.
    """
    is_mod = metrics.index.isin(list(moderators))
    rows = []
    for m in metric_names:
        col = metrics[m]
        mod = col[is_mod].dropna().to_numpy()
        other = col[~is_mod].dropna().to_numpy()
        if len(mod) < 2 or len(other) < 2:
            rows.append(FingerprintRow(m, len(mod), len(other)))
            continue
        res = welch_t_test(mod, other)
        rows.append(
            FingerprintRow(m, len(mod), len(other), float(mod.mean()), float(other.mean()),
                           res.t, res.df, res.p, res.degenerate)
        )
    return rows


def pool_networks(tables: Sequence[pd.DataFrame]) -> pd.DataFrame:
    """Z-normalize each network's metrics separately, then stack them.

    Node ids are prefixed with the network position to keep them distinct.
    """
    parts = []
    for i, table in enumerate(tables):
        z = zscore_columns(table)
        # a constant column carries no information within its network
        z = z.where(table.isna() | z.notna(), 0.0)
        z.index = [f"{i}:{v}" for v in table.index]
        parts.append(z)
    return pd.concat(parts)


@dataclass
class CandidateRanking:
    ranking: list[tuple[str, float]]
    excluded: list[str] = field(default_factory=list)  # zero-variance metrics


def rank_moderator_candidates(metrics: pd.DataFrame) -> CandidateRanking:
    """Rank nodes by the mean of direction-signed metric z-scores."""
    used = [m for m in HIGHER + LOWER if m in metrics.columns]
    z = zscore_columns(metrics[used])
    excluded = [m for m in used if z[m].isna().all() and metrics[m].notna().any()]
    for m in excluded:
        logger.info("metric %s has zero variance; left out of the moderator score", m)
    z = z.drop(columns=excluded)
    signs = pd.Series({m: (1.0 if m in HIGHER else -1.0) for m in z.columns})
    composite = (z * signs).mean(axis=1, skipna=True).fillna(0.0)
    order = sorted(composite.items(), key=lambda kv: (-kv[1], kv[0]))
    return CandidateRanking([(str(v), float(s)) for v, s in order], excluded)
