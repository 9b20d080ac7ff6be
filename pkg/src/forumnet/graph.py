"""Directed reply graph over author accounts, and its traversal kernels.

Nodes are authors; an arc ``u -> v`` means ``u`` replied to a message written
by ``v``, weighted by the number of such replies. Distances are hop counts
(arc weights are ignored for geodesics).

All-pairs work (distances, closeness, betweenness) goes through one
level-synchronous breadth-first search that processes a block of sources at
once with sparse matrix products, followed by the Brandes dependency
accumulation run level by level in the same matrix form.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .ingest import MessageEvent

DIRECTED = "directed"
UNDIRECTED = "undirected"
DIRECTIONS = (DIRECTED, UNDIRECTED)

# sources per BFS block; fixed so that floating-point sums do not depend on
# anything but the graph
BLOCK_SIZE = 256


def check_direction(direction: str) -> str:
    if direction == "undirected-projection":
        return UNDIRECTED
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    return direction


@dataclass(frozen=True)
class ForumGraph:
    nodes: tuple[str, ...]
    arcs: Mapping[tuple[str, str], int]
    messages: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def index(self) -> dict[str, int]:
        if "index" not in self._cache:
            self._cache["index"] = {v: i for i, v in enumerate(self.nodes)}
        return self._cache["index"]

    def __contains__(self, node) -> bool:
        return node in self.index

    def adjacency(self, direction: str = DIRECTED) -> sparse.csr_matrix:
        """0/1 adjacency matrix in node order (symmetrized for ``undirected``)."""
        direction = check_direction(direction)
        key = ("adj", direction)
        if key not in self._cache:
            n = self.n
            idx = self.index
            rows = np.fromiter((idx[u] for u, _ in self.arcs), dtype=np.int64, count=len(self.arcs))
            cols = np.fromiter((idx[v] for _, v in self.arcs), dtype=np.int64, count=len(self.arcs))
            if direction == UNDIRECTED:
                rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
            a = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
            a.sum_duplicates()
            a.data[:] = 1.0
            self._cache[key] = a
        return self._cache[key]

    def neighbors(self, direction: str = DIRECTED) -> list[list[int]]:
        direction = check_direction(direction)
        key = ("nbrs", direction)
        if key not in self._cache:
            a = self.adjacency(direction)
            self._cache[key] = [a.indices[a.indptr[i]:a.indptr[i + 1]].tolist() for i in range(self.n)]
        return self._cache[key]

    def out_degree(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for u, _ in self.arcs:
            deg[u] += 1
        return deg

    def in_degree(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for _, v in self.arcs:
            deg[v] += 1
        return deg

    def degree(self, direction: str = DIRECTED) -> dict[str, int]:
        """Distinct in-neighbours plus distinct out-neighbours, or distinct
        neighbours of the undirected projection."""
        direction = check_direction(direction)
        if direction == DIRECTED:
            out, inn = self.out_degree(), self.in_degree()
            return {v: out[v] + inn[v] for v in self.nodes}
        a = self.adjacency(UNDIRECTED)
        counts = np.diff(a.indptr)
        return {v: int(counts[i]) for i, v in enumerate(self.nodes)}

    def edge_count(self, direction: str = DIRECTED) -> int:
        """Distinct arcs, or distinct undirected edges of the projection."""
        if check_direction(direction) == DIRECTED:
            return len(self.arcs)
        return self.adjacency(UNDIRECTED).nnz // 2


def parent_lookup(events: Sequence[MessageEvent], context) -> dict[str, MessageEvent]:
    if context is None:
        return {ev.message_id: ev for ev in events}
    if isinstance(context, Mapping):
        lookup = dict(context)
    else:
        lookup = {ev.message_id: ev for ev in context}
    for ev in events:
        lookup[ev.message_id] = ev
    return lookup


def reply_pairs(events: Sequence[MessageEvent], context=None):
    """Yield ``(reply, parent)`` for every reply whose parent resolves and was
    written by someone else. ``context`` supplies extra messages for parent
    resolution (parents outside ``events``)."""
    lookup = parent_lookup(events, context)
    for ev in events:
        if ev.parent_id is None:
            continue
        parent = lookup.get(ev.parent_id)
        if parent is None or parent.author_id == ev.author_id:
            continue
        yield ev, parent


def build_graph(events: Sequence[MessageEvent], context=None) -> ForumGraph:
    """Build the author reply graph.

    Every author of an event becomes a node. When ``context`` resolves a
    parent that is not among ``events`` (e.g. a time-window slice), the
    parent's author is added as a node as well.
    """
    authored: dict[str, list[tuple[int, str]]] = {}
    for ev in events:
        authored.setdefault(ev.author_id, []).append((ev.timestamp, ev.message_id))
    nodes = set(authored)
    arcs: dict[tuple[str, str], int] = {}
    for reply, parent in reply_pairs(events, context):
        key = (reply.author_id, parent.author_id)
        arcs[key] = arcs.get(key, 0) + 1
        nodes.add(parent.author_id)
    messages = {a: tuple(m for _, m in sorted(authored.get(a, ()))) for a in sorted(nodes)}
    return ForumGraph(
        nodes=tuple(sorted(nodes)),
        arcs={k: arcs[k] for k in sorted(arcs)},
        messages=messages,
    )


def subgraph_without(graph: ForumGraph, removed: Iterable[str]) -> ForumGraph:
    removed = set(removed)
    unknown = removed - set(graph.nodes)
    if unknown:
        raise KeyError(f"nodes not in graph: {sorted(unknown)[:10]}")
    if not removed:
        return graph
    return ForumGraph(
        nodes=tuple(v for v in graph.nodes if v not in removed),
        arcs={k: w for k, w in graph.arcs.items() if k[0] not in removed and k[1] not in removed},
        messages={v: m for v, m in graph.messages.items() if v not in removed},
    )


def write_arc_list(graph: ForumGraph, dest) -> None:
    dest.write("source,target,weight\n")
    for (u, v), w in graph.arcs.items():
        dest.write(f"{u},{v},{w}\n")


# -- traversal -------------------------------------------------------------


def shortest_path_lengths(graph: ForumGraph, source: str, direction: str = DIRECTED) -> dict[str, Optional[int]]:
    """Hop distance from ``source`` to every node; ``None`` marks unreachable."""
    if source not in graph:
        raise KeyError(f"unknown source node {source!r}")
    nbrs = graph.neighbors(check_direction(direction))
    s = graph.index[source]
    dist = [-1] * graph.n
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return {v: (d if d >= 0 else None) for v, d in zip(graph.nodes, dist)}


@dataclass(frozen=True)
class Components:
    parts: list[frozenset]
    giant: frozenset


def connected_components(graph: ForumGraph, mode: str = "weak") -> Components:
    """Weak or strong components, largest first.

    Among equally large components the one holding the smallest node id is
    ranked first and reported as the giant component.
    """
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
    if graph.n == 0:
        return Components([], frozenset())
    _, labels = csgraph.connected_components(graph.adjacency(DIRECTED), directed=True, connection=mode)
    groups: dict[int, list[str]] = {}
    for v, lab in zip(graph.nodes, labels):
        groups.setdefault(int(lab), []).append(v)
    parts = sorted((frozenset(g) for g in groups.values()), key=lambda p: (-len(p), min(p)))
    return Components(parts, parts[0])


@dataclass(frozen=True)
class PathStats:
    """Per-source geodesic summaries plus betweenness, all in node order."""

    reach: np.ndarray  # nodes reachable from the source, excluding itself
    dist_sum: np.ndarray  # sum of hop distances to those nodes
    ecc: np.ndarray  # largest finite distance (0 when nothing is reachable)
    betweenness: np.ndarray


def _bfs_block(a_t: sparse.csr_matrix, sources: np.ndarray, n: int):
    b = len(sources)
    cols = np.arange(b)
    dist = np.full((n, b), -1, dtype=np.int32)
    sigma = np.zeros((n, b))
    dist[sources, cols] = 0
    sigma[sources, cols] = 1.0
    frontier = sigma.copy()
    depth = 0
    while True:
        # path counts one hop further: nxt[v, i] = sum_u A[u, v] * frontier[u, i]
        nxt = a_t @ frontier
        new = (nxt > 0) & (dist < 0)
        if not new.any():
            break
        depth += 1
        dist[new] = depth
        sigma[new] = nxt[new]
        frontier = np.where(new, nxt, 0.0)
    return dist, sigma, depth


def _accumulate(a: sparse.csr_matrix, dist: np.ndarray, sigma: np.ndarray, depth: int) -> np.ndarray:
    delta = np.zeros_like(sigma)
    for level in range(depth, 0, -1):
        at = dist == level
        coef = np.zeros_like(sigma)
        coef[at] = (1.0 + delta[at]) / sigma[at]
        # sum over successors w of v at the next level
        contrib = a @ coef
        prev = dist == level - 1
        delta[prev] += sigma[prev] * contrib[prev]
    delta[dist <= 0] = 0.0  # sources and unreachable nodes earn nothing
    return delta.sum(axis=1)


def path_statistics(graph: ForumGraph, direction: str = DIRECTED) -> PathStats:
    direction = check_direction(direction)
    key = ("paths", direction)
    if key in graph._cache:
        return graph._cache[key]
    n = graph.n
    reach = np.zeros(n, dtype=np.int64)
    dist_sum = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int64)
    bc = np.zeros(n)
    if n:
        a = graph.adjacency(direction)
        a_t = a.T.tocsr()
        for start in range(0, n, BLOCK_SIZE):
            sources = np.arange(start, min(start + BLOCK_SIZE, n))
            dist, sigma, depth = _bfs_block(a_t, sources, n)
            pos = dist > 0
            reach[sources] = pos.sum(axis=0)
            dist_sum[sources] = np.where(pos, dist, 0).sum(axis=0)
            ecc[sources] = dist.max(axis=0).clip(min=0)
            bc += _accumulate(a, dist, sigma, depth)
    stats = PathStats(reach, dist_sum, ecc, bc)
    graph._cache[key] = stats
    return stats


def betweenness(graph: ForumGraph, direction: str = DIRECTED) -> dict[str, float]:
    """Unnormalized shortest-path betweenness over ordered source/target pairs.

    Credit is split evenly among multiple shortest paths; endpoints earn none.
    """
    bc = path_statistics(graph, direction).betweenness
    return {v: float(bc[i]) for i, v in enumerate(graph.nodes)}
