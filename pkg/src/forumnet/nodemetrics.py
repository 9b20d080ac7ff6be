"""Assemble the full per-node metric table."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from .graph import DIRECTED, ForumGraph, build_graph, check_direction
from .ingest import MessageEvent
from .interaction import (
    DEFAULT_WINDOW,
    activity_and_contribution,
    betweenness_oscillations,
    nudges,
    response_times,
)
from .semantic import node_semantics, score_sentiment
from .structural import node_centralities

NODE_METRICS = (
    "degree",
    "closeness",
    "betweenness",
    "betweenness_oscillations",
    "activity",
    "sent",
    "received",
    "contribution_index",
    "ego_art",
    "alter_art",
    "ego_nudges",
    "alter_nudges",
    "sentiment",
    "emotionality",
    "complexity",
)
INTEGER_METRICS = frozenset({"degree", "betweenness_oscillations", "activity", "sent", "received"})


@dataclass(frozen=True)
class MetricConfig:
    direction: str = DIRECTED
    window: int = DEFAULT_WINDOW  # seconds
    lexicon: Optional[Mapping[str, str]] = None
    # pin the oscillation window grid, so filtered corpora share the original grid
    window_start: Optional[int] = None
    window_end: Optional[int] = None

    def __post_init__(self):
        check_direction(self.direction)
        if self.window <= 0:
            raise ValueError(f"oscillation window must be positive, got {self.window}")


def compute_node_metrics(
    events: Sequence[MessageEvent],
    graph: Optional[ForumGraph] = None,
    config: MetricConfig = MetricConfig(),
    context=None,
) -> pd.DataFrame:
    """One row per graph node, one float column per metric (NaN = missing)."""
    if graph is None:
        graph = build_graph(events, context)
    cent = node_centralities(graph, config.direction)
    flow = activity_and_contribution(events, graph, context)
    art = response_times(events, context)
    nud = nudges(events, context)
    osc = betweenness_oscillations(
        events, config.window, config.direction, config.window_start, config.window_end, context
    )
    sem = node_semantics(events, score_sentiment(events, config.lexicon))
    rows = []
    for v in graph.nodes:
        row = dict(cent[v])
        row["betweenness_oscillations"] = osc.get(v, 0)
        row.update(flow[v])
        row.update(art.get(v, {}))
        row.update(nud.get(v, {}))
        row.update(sem.get(v, {}))
        rows.append([row.get(m) for m in NODE_METRICS])
    df = pd.DataFrame(rows, index=pd.Index(graph.nodes, name="node"), columns=list(NODE_METRICS), dtype=float)
    return df


def format_value(value, integer: bool = False) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if integer:
        return str(int(value))
    return repr(float(value))


def write_node_metrics(table: pd.DataFrame, dest) -> None:
    """Delimited table; missing values become empty fields."""
    cols = list(table.columns)
    dest.write(",".join(["node"] + cols) + "\n")
    values = table.to_numpy()
    for node, row in zip(table.index, values):
        cells = [format_value(x, c in INTEGER_METRICS) for c, x in zip(cols, row)]
        dest.write(",".join([str(node)] + cells) + "\n")


def read_node_metrics(source) -> pd.DataFrame:
    df = pd.read_csv(source, dtype={"node": str}, keep_default_na=False, na_values=[""])
    return df.set_index("node").astype(float)


def zscore_columns(table: pd.DataFrame) -> pd.DataFrame:
    """Per-column z-scores with the population standard deviation (NaN kept)."""
    mean = table.mean()
    std = table.std(ddof=0).replace(0, np.nan)
    return (table - mean) / std
