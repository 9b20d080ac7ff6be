"""Whole-network summary metrics and node centralities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import DIRECTED, UNDIRECTED, ForumGraph, check_direction, path_statistics


@dataclass(frozen=True)
class NetworkSummary:
    n: int
    arc_count: int
    adarp: Optional[float]  # average distance among reachable pairs
    diameter: Optional[int]
    clustering: Optional[float]
    avg_degree: Optional[float]


def transitivity(graph: ForumGraph) -> float:
    """Global clustering on the undirected projection: closed over connected triples."""
    a = graph.adjacency(UNDIRECTED)
    deg = np.diff(a.indptr).astype(np.float64)
    triples = float((deg * (deg - 1) / 2).sum())
    if triples == 0:
        return 0.0
    # (A^2 o A).sum() counts every triangle six times
    closed = float((a @ a).multiply(a).sum()) / 2
    return closed / triples


def network_summary(graph: ForumGraph, direction: str = DIRECTED) -> NetworkSummary:
    direction = check_direction(direction)
    n = graph.n
    if n == 0:
        return NetworkSummary(0, 0, None, None, None, None)
    stats = path_statistics(graph, direction)
    pairs = int(stats.reach.sum())
    m = graph.edge_count(direction)
    return NetworkSummary(
        n=n,
        arc_count=m,
        adarp=float(stats.dist_sum.sum()) / pairs if pairs else None,
        diameter=int(stats.ecc.max()) if pairs else None,
        clustering=transitivity(graph),
        avg_degree=2.0 * m / n,
    )


def closeness(graph: ForumGraph, direction: str = DIRECTED) -> dict[str, float]:
    """Closeness with the correction for disconnected graphs:
    ``(r / (n - 1)) * (r / sum of distances)`` over the ``r`` reachable nodes."""
    stats = path_statistics(graph, direction)
    n = graph.n
    out = {}
    for i, v in enumerate(graph.nodes):
        r = int(stats.reach[i])
        out[v] = (r / (n - 1)) * (r / float(stats.dist_sum[i])) if r else 0.0
    return out


def node_centralities(graph: ForumGraph, direction: str = DIRECTED) -> dict[str, dict[str, float]]:
    deg = graph.degree(direction)
    clo = closeness(graph, direction)
    bc = path_statistics(graph, direction).betweenness
    return {
        v: {"degree": deg[v], "closeness": clo[v], "betweenness": float(bc[i])}
        for i, v in enumerate(graph.nodes)
    }
