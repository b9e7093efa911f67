"""Truncated model spaces: regular trees, {p,q} tilings, grids, G(n, p)."""
from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .graph import TOL, WeightedMetricGraph

KINDS = ("regular-tree", "hyperbolic-tiling", "euclidean-grid", "random-gnp")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    branching: int = 2
    radius: int = 3
    p: int = 7
    q: int = 3
    n: int = 6
    prob: float = 0.1
    seed: int = 0
    edge_length: float = 1.0
    subdivision: int = 1

    def params(self) -> dict:
        keep = {
            "regular-tree": ("branching", "radius"),
            "hyperbolic-tiling": ("p", "q", "radius"),
            "euclidean-grid": ("n",),
            "random-gnp": ("n", "prob", "seed"),
        }[self.kind]
        d = asdict(self)
        out = {k: d[k] for k in keep}
        out.update(kind=self.kind, edge_length=self.edge_length, subdivision=self.subdivision)
        return out


def regular_tree(branching: int, radius: int) -> tuple[int, list, list]:
    """Rooted tree, every internal node has ``branching`` children; BFS numbering."""
    if branching < 2 or radius < 1:
        raise ValueError("regular tree needs branching >= 2 and radius >= 1")
    edges, level, nxt = [], [0], 1
    for _ in range(radius):
        new_level = []
        for u in level:
            for _ in range(branching):
                edges.append((u, nxt))
                new_level.append(nxt)
                nxt += 1
        level = new_level
    return nxt, edges, level


class _TilingBuilder:
    """Grow a disc of the {p,q} tiling by gluing p-gons onto its boundary cycle."""

    def __init__(self, p: int, q: int):
        self.p, self.q = p, q
        self.adj: list[set[int]] = []
        self.faces: list[int] = []  # number of faces incident to each vertex
        first = [self._new_vertex() for _ in range(p)]
        for a, b in zip(first, first[1:] + first[:1]):
            self._link(a, b)
        for v in first:
            self.faces[v] = 1
        self.boundary = first

    def _new_vertex(self) -> int:
        self.adj.append(set())
        self.faces.append(0)
        return len(self.adj) - 1

    def _link(self, a: int, b: int) -> None:
        if b in self.adj[a]:
            raise RuntimeError(f"tiling construction produced a duplicate edge {a}-{b}")
        self.adj[a].add(b)
        self.adj[b].add(a)

    def _missing(self, v: int) -> int:
        return self.q - self.faces[v]

    def _glue(self, i: int) -> None:
        """Add one face on the boundary edge ``boundary[i] -> boundary[i+1]``."""
        B = self.boundary
        m = len(B)
        start, end = i, i + 1
        # a vertex with one missing face gets closed: the face takes both its boundary edges
        while self._missing(B[start % m]) == 1 and end - start < m:
            start -= 1
        while self._missing(B[end % m]) == 1 and end - start < m:
            end += 1
        seg = [B[k % m] for k in range(start, end + 1)]
        shared = len(seg) - 1
        fresh = self.p - shared - 1
        if fresh < 0:
            raise RuntimeError("tiling construction overshot a face")
        new = [self._new_vertex() for _ in range(fresh)]
        chain = [seg[-1]] + new + [seg[0]]
        for a, b in zip(chain, chain[1:]):
            self._link(a, b)
        for v in seg:
            self.faces[v] += 1
        for v in new:
            self.faces[v] = 1
        # rotate so the glued segment starts at index 0, then splice the new outer side
        s = start % m
        rot = B[s:] + B[:s]
        self.boundary = [seg[0]] + new[::-1] + [seg[-1]] + rot[len(seg):]

    def complete(self, v: int) -> None:
        while self._missing(v) > 0:
            self._glue(self.boundary.index(v))

    def distances(self, source: int = 0) -> list[int]:
        dist = [-1] * len(self.adj)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def hyperbolic_tiling(p: int, q: int, radius: int) -> tuple[int, list, list]:
    """Ball of graph radius ``radius`` about a vertex of the {p,q} tiling skeleton."""
    if p < 3 or q < 3:
        raise ValueError("tiling needs p >= 3 and q >= 3")
    if Fraction(1, p) + Fraction(1, q) >= Fraction(1, 2):
        raise ValueError(f"{{{p},{q}}} tiling is not hyperbolic (needs 1/p + 1/q < 1/2)")
    if radius < 1:
        raise ValueError("tiling needs radius >= 1")
    tb = _TilingBuilder(p, q)
    for r in range(radius + 1):
        dist = tb.distances(0)
        for v in [v for v in tb.boundary if dist[v] == r]:
            if v in tb.boundary:
                tb.complete(v)
    dist = tb.distances(0)
    keep = sorted((v for v in range(len(tb.adj)) if 0 <= dist[v] <= radius), key=lambda v: (dist[v], v))
    label = {v: i for i, v in enumerate(keep)}
    edges = sorted(
        {(min(label[a], label[b]), max(label[a], label[b]))
         for a in keep for b in tb.adj[a] if b in label}
    )
    frontier = [label[v] for v in keep if dist[v] == radius]
    return len(keep), edges, frontier


def euclidean_grid(n: int) -> tuple[int, list, list, int]:
    if n < 2:
        raise ValueError("grid needs n >= 2")
    edges = []
    for i in range(n):
        for j in range(n):
            v = i * n + j
            if j + 1 < n:
                edges.append((v, v + 1))
            if i + 1 < n:
                edges.append((v, v + n))
    frontier = [i * n + j for i in range(n) for j in range(n) if i in (0, n - 1) or j in (0, n - 1)]
    base = (n // 2) * n + n // 2
    return n * n, edges, frontier, base


def random_gnp(n: int, prob: float, seed: int) -> tuple[int, list]:
    """Erdős–Rényi graph; components are chained by their smallest nodes."""
    if n < 1 or not 0.0 <= prob <= 1.0:
        raise ValueError("random-gnp needs n >= 1 and 0 <= prob <= 1")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < prob]
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        parent[find(i)] = find(j)
    roots = sorted({min(v for v in range(n) if find(v) == r) for r in {find(v) for v in range(n)}})
    edges += list(zip(roots, roots[1:]))
    return n, sorted(edges)


def subdivide(n: int, edges: list[tuple[int, int]], length: float, k: int):
    """Split every edge into ``k`` pieces of length ``length / k``; new nodes come after ``n``."""
    if k < 1:
        raise ValueError("subdivision must be a positive integer")
    piece = length / k
    out = []
    nxt = n
    owners = {}
    for u, v in edges:
        chain = [u]
        for _ in range(k - 1):
            chain.append(nxt)
            owners[nxt] = (u, v)
            nxt += 1
        chain.append(v)
        out.extend((a, b, piece) for a, b in zip(chain, chain[1:]))
    return nxt, out, owners


def generate(spec: GeneratorSpec) -> WeightedMetricGraph:
    """Build the truncated space described by ``spec`` (deterministic)."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown generator kind {spec.kind!r}; expected one of {KINDS}")
    if not spec.edge_length > 0:
        raise ValueError("edge_length must be positive")
    base = 0
    frontier: list[int] = []
    radius = None
    if spec.kind == "regular-tree":
        n, edges, frontier = regular_tree(spec.branching, spec.radius)
        radius = spec.radius
    elif spec.kind == "hyperbolic-tiling":
        n, edges, frontier = hyperbolic_tiling(spec.p, spec.q, spec.radius)
        radius = spec.radius
    elif spec.kind == "euclidean-grid":
        n, edges, frontier, base = euclidean_grid(spec.n)
    else:
        n, edges = random_gnp(spec.n, spec.prob, spec.seed)

    total, wedges, owners = subdivide(n, edges, spec.edge_length, spec.subdivision)
    if spec.kind == "euclidean-grid":
        fset = set(frontier)
        frontier = frontier + [v for v, (a, b) in owners.items() if a in fset and b in fset]
    meta = spec.params()
    meta["original_nodes"] = n
    if radius is not None:
        meta["truncation_radius"] = radius * spec.edge_length
    g = WeightedMetricGraph(total, wedges, base, frontier, meta)
    if radius is not None:
        d = g.distances_from(base)
        target = radius * spec.edge_length
        assert all(abs(d[f] - target) <= TOL for f in g.frontier)
    return g
