"""Finite weighted graphs as metric spaces, arcs on them, and the edge-list format."""
from __future__ import annotations

import heapq
import io
import json
import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels

#: absolute slack accepted by every inequality check
TOL = 1e-9


class GraphError(ValueError):
    """Raised for graphs that violate the construction invariants."""


class WeightedMetricGraph:
    """Connected, positively weighted, simple graph on nodes ``0..n-1``.

    The shortest-path metric is computed once on first use and cached as a
    read-only array.  Instances are treated as immutable.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        base: int = 0,
        frontier: Iterable[int] = (),
        metadata: dict | None = None,
    ):
        if n < 1:
            raise GraphError("graph needs at least one node")
        canon: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a missing node")
            if not w > 0 or not np.isfinite(w):
                raise GraphError(f"edge ({u}, {v}) has non-positive length {w}")
            key = (u, v) if u < v else (v, u)
            if key in canon:
                raise GraphError(f"duplicate edge {key}")
            canon[key] = w
        if not 0 <= base < n:
            raise GraphError(f"base point {base} is not a node")
        front = tuple(sorted({int(f) for f in frontier}))
        if front and not (0 <= front[0] and front[-1] < n):
            raise GraphError("frontier is not a subset of the nodes")

        self.n = int(n)
        self.base = int(base)
        self.frontier = front
        self.metadata = dict(metadata or {})
        self.edges = tuple((u, v, w) for (u, v), w in sorted(canon.items()))

        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for row in adj:
            row.sort()
        self._adj = tuple(tuple(row) for row in adj)
        self._weight = canon
        if not self._connected():
            raise GraphError("graph is disconnected")

    def _connected(self) -> bool:
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v, _ in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count == self.n

    def __repr__(self) -> str:
        kind = self.metadata.get("kind", "graph")
        return f"WeightedMetricGraph({kind}, n={self.n}, m={len(self.edges)}, base={self.base})"

    def neighbors(self, u: int) -> tuple[tuple[int, float], ...]:
        """``(v, length)`` pairs sorted by ``v``."""
        return self._adj[u]

    def edge_length(self, u: int, v: int) -> float:
        return self._weight[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._weight

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for u in range(self.n):
            indptr[u + 1] = indptr[u] + len(self._adj[u])
        indices = np.fromiter((v for row in self._adj for v, _ in row), dtype=np.int32,
                              count=int(indptr[-1]))
        weights = np.fromiter((w for row in self._adj for _, w in row), dtype=np.float64,
                              count=int(indptr[-1]))
        return indptr, indices, weights

    @cached_property
    def distances(self) -> np.ndarray:
        """Dense shortest-path table (read-only)."""
        indptr, indices, weights = self.csr()
        D = kernels.apsp(indptr, indices, weights, self.n)
        D.flags.writeable = False
        return D

    def distances_from(self, source: int) -> np.ndarray:
        """Single-source distances without forcing the dense table."""
        if "distances" in self.__dict__:
            return self.distances[source]
        dist = [float("inf")] * self.n
        done = [False] * self.n
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w in self._adj[u]:
                nd = du + w
                if not done[v] and nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return np.asarray(dist)

    def distance(self, x: int, y: int) -> float:
        return float(self.distances[x, y])

    def reweighted(self, weights: Sequence[float], metadata: dict | None = None) -> "WeightedMetricGraph":
        """Same combinatorics, new edge lengths in ``self.edges`` order."""
        edges = [(u, v, float(w)) for (u, v, _), w in zip(self.edges, weights)]
        return WeightedMetricGraph(self.n, edges, self.base, self.frontier,
                                   metadata if metadata is not None else self.metadata)

    def induced(self, nodes: Sequence[int]) -> tuple["WeightedMetricGraph", list[int]]:
        """Induced subgraph on ``nodes`` (sorted), relabelled ``0..k-1``."""
        order = sorted(nodes)
        local = {v: i for i, v in enumerate(order)}
        edges = [(local[u], local[v], w) for u, v, w in self.edges if u in local and v in local]
        base = local.get(self.base, 0)
        front = [local[f] for f in self.frontier if f in local]
        return WeightedMetricGraph(len(order), edges, base, front), order

    @property
    def total_length(self) -> float:
        return float(sum(w for _, _, w in self.edges))


@dataclass(frozen=True)
class ArcPath:
    """Node sequence with its cumulative arclength, ``cum_length[0] == 0``."""

    nodes: tuple[int, ...]
    cum_length: tuple[float, ...]

    @classmethod
    def from_nodes(cls, g: WeightedMetricGraph, nodes: Sequence[int]) -> "ArcPath":
        nodes = tuple(int(v) for v in nodes)
        if not nodes:
            raise ValueError("an arc needs at least one node")
        cum = [0.0]
        for u, v in zip(nodes, nodes[1:]):
            if not g.has_edge(u, v):
                raise ValueError(f"nodes {u} and {v} are not adjacent")
            cum.append(cum[-1] + g.edge_length(u, v))
        return cls(nodes, tuple(cum))

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def first(self) -> int:
        return self.nodes[0]

    @property
    def last(self) -> int:
        return self.nodes[-1]

    @property
    def length(self) -> float:
        return self.cum_length[-1]

    @property
    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def excess(self, g: WeightedMetricGraph) -> float:
        """``length - d(first, last)``; the arc is h-short iff this is <= h."""
        return self.length - g.distance(self.first, self.last)

    def is_h_short(self, g: WeightedMetricGraph, h: float, tol: float = TOL) -> bool:
        return self.excess(g) <= h + tol

    def index_at(self, t: float) -> int:
        """Vertex index whose arclength parameter is closest to ``t`` (lowest on ties)."""
        cum = np.asarray(self.cum_length)
        return int(np.argmin(np.abs(cum - t)))

    def weighted_cum(self, g: WeightedMetricGraph) -> np.ndarray:
        """Cumulative length of this node sequence measured with ``g``'s weights."""
        out = np.zeros(len(self.nodes))
        acc = 0.0
        for i, (u, v) in enumerate(zip(self.nodes, self.nodes[1:]), start=1):
            acc = acc + g.edge_length(u, v)
            out[i] = acc
        return out


# -- edge-list file format ----------------------------------------------------

def format_graph(g: WeightedMetricGraph, weights: Sequence[float] | None = None,
                 density: Sequence[float] | None = None) -> str:
    """Serialise to the text edge-list format.

    ``weights`` overrides the edge lengths (deformed files); ``density``
    appends a ``density`` block with one ``node value`` line per node.
    """
    out = io.StringIO()
    if g.metadata:
        out.write("# meta " + json.dumps(g.metadata, sort_keys=True) + "\n")
    out.write(f"nodes {g.n} base {g.base}\n")
    if g.frontier:
        out.write("frontier " + " ".join(str(f) for f in g.frontier) + "\n")
    ws = [w for _, _, w in g.edges] if weights is None else weights
    for (u, v, _), w in zip(g.edges, ws):
        out.write(f"{u} {v} {float(w)!r}\n")
    if density is not None:
        out.write("density\n")
        for i, rho in enumerate(density):
            out.write(f"{i} {float(rho)!r}\n")
    return out.getvalue()


def parse_graph(text: str) -> tuple[WeightedMetricGraph, np.ndarray | None]:
    """Inverse of :func:`format_graph`; returns the graph and the density block if any."""
    n = base = None
    frontier: list[int] = []
    edges = []
    metadata: dict = {}
    density = None
    in_density = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# meta "):
                metadata = json.loads(line[len("# meta "):])
            continue
        parts = line.split()
        try:
            if in_density:
                density[int(parts[0])] = float(parts[1])
            elif parts[0] == "nodes":
                if len(parts) != 4 or parts[2] != "base":
                    raise GraphError(f"line {lineno}: expected 'nodes N base P'")
                n, base = int(parts[1]), int(parts[3])
            elif parts[0] == "frontier":
                frontier = [int(x) for x in parts[1:]]
            elif parts[0] == "density":
                if n is None:
                    raise GraphError("density block before header")
                density = np.full(n, np.nan)
                in_density = True
            else:
                if n is None:
                    raise GraphError(f"line {lineno}: edge before 'nodes' header")
                if len(parts) != 3:
                    raise GraphError(f"line {lineno}: expected 'u v length'")
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"line {lineno}: cannot parse {line!r}") from exc
    if n is None:
        raise GraphError("missing 'nodes N base P' header")
    if density is not None and np.isnan(density).any():
        raise GraphError("density block is incomplete")
    return WeightedMetricGraph(n, edges, base, frontier, metadata), density


def write_graph(g: WeightedMetricGraph, path: str | os.PathLike, **kw) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g, **kw))


def read_graph(path: str | os.PathLike) -> WeightedMetricGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())[0]
