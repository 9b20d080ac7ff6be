"""Message-flow metrics: activity, contribution index, response times,
nudges and betweenness oscillations.

Every function takes the event list it should measure. ``context`` is an
optional wider collection of messages used only to resolve reply parents,
which matters once events have been filtered (a kept reply may answer a
message that was itself dropped).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import DIRECTED, betweenness, build_graph, parent_lookup, reply_pairs
from .ingest import MessageEvent

DAY = 86400
DEFAULT_WINDOW = 7 * DAY


def contribution_index(sent: int, received: int) -> Optional[float]:
    total = sent + received
    return (sent - received) / total if total else None


def activity_and_contribution(events: Sequence[MessageEvent], graph=None, context=None) -> dict[str, dict]:
    """Per-node sent/received counts and contribution index.

    ``sent`` counts every authored message; ``received`` counts replies by
    other authors to the node's messages. Nodes of ``graph`` that have no
    events still get a row (all counts zero).
    """
    sent: dict[str, int] = defaultdict(int)
    received: dict[str, int] = defaultdict(int)
    for ev in events:
        sent[ev.author_id] += 1
    for _, parent in reply_pairs(events, context):
        received[parent.author_id] += 1
    nodes = set(sent) | set(received)
    if graph is not None:
        nodes |= set(graph.nodes)
    return {
        v: {
            "activity": sent[v],
            "sent": sent[v],
            "received": received[v],
            "contribution_index": contribution_index(sent[v], received[v]),
        }
        for v in sorted(nodes)
    }


def _mean(values: list) -> Optional[float]:
    return sum(values) / len(values) if values else None


def response_times(events: Sequence[MessageEvent], context=None) -> dict[str, dict]:
    """Ego ART: mean delay of a node's own replies. Alter ART: mean delay of
    replies others made to the node's messages. Seconds; ``None`` if empty."""
    ego: dict[str, list[int]] = defaultdict(list)
    alter: dict[str, list[int]] = defaultdict(list)
    for reply, parent in reply_pairs(events, context):
        delay = reply.timestamp - parent.timestamp
        ego[reply.author_id].append(delay)
        alter[parent.author_id].append(delay)
    nodes = {ev.author_id for ev in events} | set(alter)
    return {v: {"ego_art": _mean(ego[v]), "alter_art": _mean(alter[v])} for v in sorted(nodes)}


def nudge_episodes(events: Sequence[MessageEvent], context=None) -> list[tuple[str, str, int]]:
    """Closed nudge episodes as ``(pinger, answerer, count)``.

    A reply by ``a`` to a message of ``u`` is a ping from ``a`` toward ``u``
    and, at the same time, an answer from ``a`` to ``u``. An answer closes the
    episode of pings that ``u`` sent to ``a`` since ``a`` last answered.
    Pings still pending at the end are dropped.
    """
    pending: dict[tuple[str, str], int] = defaultdict(int)
    episodes = []
    ordered = sorted(events, key=lambda e: (e.timestamp, e.message_id))
    for reply, parent in reply_pairs(ordered, context):
        a, u = reply.author_id, parent.author_id
        waiting = pending.pop((u, a), 0)
        if waiting:
            episodes.append((u, a, waiting))
        pending[(a, u)] += 1
    return episodes


def nudges(events: Sequence[MessageEvent], context=None) -> dict[str, dict]:
    ego: dict[str, list[int]] = defaultdict(list)
    alter: dict[str, list[int]] = defaultdict(list)
    for pinger, answerer, count in nudge_episodes(events, context):
        ego[pinger].append(count)
        alter[answerer].append(count)
    nodes = {ev.author_id for ev in events} | set(alter) | set(ego)
    return {v: {"ego_nudges": _mean(ego[v]), "alter_nudges": _mean(alter[v])} for v in sorted(nodes)}


def count_oscillations(series: Iterable[float]) -> int:
    """Number of strict interior local extrema after merging equal runs."""
    compressed: list[float] = []
    for x in series:
        if not compressed or x != compressed[-1]:
            compressed.append(x)
    count = 0
    for prev, cur, nxt in zip(compressed, compressed[1:], compressed[2:]):
        if (cur > prev and cur > nxt) or (cur < prev and cur < nxt):
            count += 1
    return count


def window_betweenness(
    events: Sequence[MessageEvent],
    window: int,
    direction: str = DIRECTED,
    start: Optional[int] = None,
    end: Optional[int] = None,
    context=None,
) -> tuple[list[str], np.ndarray]:
    """Betweenness per tumbling window: (nodes, array of shape nodes x windows).

    Windows start at ``start`` (default: first event) and cover up to ``end``
    (default: last event). Nodes absent from a window score 0 there.
    """
    if window <= 0:
        raise ValueError(f"window length must be positive, got {window}")
    nodes = sorted({ev.author_id for ev in events})
    if not events:
        return nodes, np.zeros((0, 0))
    start = min(ev.timestamp for ev in events) if start is None else start
    end = max(ev.timestamp for ev in events) if end is None else end
    n_windows = (end - start) // window + 1
    buckets: dict[int, list[MessageEvent]] = defaultdict(list)
    for ev in events:
        buckets[(ev.timestamp - start) // window].append(ev)
    lookup = parent_lookup(events, context)
    row = {v: i for i, v in enumerate(nodes)}
    out = np.zeros((len(nodes), n_windows))
    for k in sorted(buckets):
        if not 0 <= k < n_windows:
            continue
        g = build_graph(buckets[k], context=lookup)
        for v, score in betweenness(g, direction).items():
            if v in row:
                out[row[v], k] = score
    return nodes, out


def betweenness_oscillations(
    events: Sequence[MessageEvent],
    window: int = DEFAULT_WINDOW,
    direction: str = DIRECTED,
    start: Optional[int] = None,
    end: Optional[int] = None,
    context=None,
) -> dict[str, int]:
    nodes, series = window_betweenness(events, window, direction, start, end, context)
    # equal scores from different windows may differ in the last bits
    series = np.round(series, 9)
    return {v: count_oscillations(series[i]) for i, v in enumerate(nodes)}
