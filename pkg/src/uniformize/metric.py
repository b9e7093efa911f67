"""Distances, arcs, Gromov products and four-point hyperbolicity on graphs."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import networkx as nx
import numpy as np

from . import kernels
from .graph import TOL, ArcPath, WeightedMetricGraph
from .records import CheckRecord, status_of

#: largest block for which the O(n^4) global scan runs without ``force``
GLOBAL_SIZE_LIMIT = 400
#: largest graph for which global mode also reports the base-point value
BASE_SIZE_LIMIT = 1200


def all_pairs_distance(g: WeightedMetricGraph) -> np.ndarray:
    return g.distances


# -- arcs ---------------------------------------------------------------------

def shortest_arc(g: WeightedMetricGraph, x: int, y: int) -> ArcPath:
    """Lexicographically smallest shortest path from ``x`` to ``y``."""
    dy = g.distances[y]
    path = [x]
    u = x
    while u != y:
        for v, w in g.neighbors(u):
            if w + dy[v] <= dy[u] + TOL and dy[v] < dy[u]:
                path.append(v)
                u = v
                break
        else:  # pragma: no cover - impossible on a connected graph
            raise RuntimeError(f"no descent from {u} towards {y}")
    return ArcPath.from_nodes(g, path)


def _path_length(g: WeightedMetricGraph, path) -> float:
    acc = 0.0
    for u, v in zip(path, path[1:]):
        acc = acc + g.edge_length(u, v)
    return acc


def _spur_path(g, source, target, banned_nodes, banned_edges):
    """Shortest path avoiding the banned sets; lexicographic among equal lengths."""
    heap = [(0.0, (source,))]
    done = set()
    while heap:
        d, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        if u == target:
            return path
        done.add(u)
        for v, w in g.neighbors(u):
            if v in done or v in banned_nodes or (u, v) in banned_edges:
                continue
            heapq.heappush(heap, (d + w, path + (v,)))
    return None


def h_short_arcs(g: WeightedMetricGraph, x: int, y: int, h: float, limit: int = 10) -> list[ArcPath]:
    """Simple ``x -> y`` paths of length <= d(x, y) + h, shortest first (Yen).

    Ties in length are broken lexicographically on the node sequence.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    if limit <= 0:
        return []
    budget = g.distance(x, y) + h + TOL
    first = shortest_arc(g, x, y).nodes
    accepted = [first]
    seen = {first}
    candidates: list[tuple[float, tuple[int, ...]]] = []
    while len(accepted) < limit:
        prev = accepted[-1]
        for i in range(len(prev) - 1):
            root = prev[: i + 1]
            banned_edges = set()
            for p in accepted:
                if p[: i + 1] == root and len(p) > i + 1:
                    banned_edges.add((p[i], p[i + 1]))
                    banned_edges.add((p[i + 1], p[i]))
            spur = _spur_path(g, prev[i], y, set(root[:-1]), banned_edges)
            if spur is None:
                continue
            total = root[:-1] + spur
            if total not in seen:
                seen.add(total)
                heapq.heappush(candidates, (_path_length(g, total), total))
        if not candidates:
            break
        length, path = heapq.heappop(candidates)
        if length > budget:
            break
        accepted.append(path)
    return [ArcPath.from_nodes(g, p) for p in accepted]


# -- Gromov products ----------------------------------------------------------

@dataclass(frozen=True)
class GromovProductTable:
    base: int
    values: np.ndarray

    def __getitem__(self, pair) -> float:
        x, y = pair
        return float(self.values[x, y])


def gromov_products(g: WeightedMetricGraph, base: int) -> GromovProductTable:
    D = g.distances
    col = D[:, base]
    vals = (col[:, None] + col[None, :] - D) / 2.0
    vals.flags.writeable = False
    return GromovProductTable(base, vals)


def gromov_product(D: np.ndarray, x: int, y: int, p: int) -> float:
    return float((D[x, p] + D[y, p] - D[x, y]) / 2.0)


# -- hyperbolicity ------------------------------------------------------------

def four_point_defect(D, x: int, y: int, z: int, p: int) -> float:
    """``min((x|y)_p, (y|z)_p) - (x|z)_p`` in the rounding-stable pair-sum form.

    Algebraically ``(d(x,z) + d(y,p) - max(d(x,y) + d(z,p), d(y,z) + d(x,p))) / 2``;
    the kernels evaluate exactly this expression.
    """
    a = D[x, y] + D[z, p]
    b = D[y, z] + D[x, p]
    return float((D[x, z] + D[y, p] - max(a, b)) * 0.5)


@dataclass(frozen=True)
class HyperbolicityReport:
    delta_base: float | None
    delta_global: float | None
    witness: tuple[int, int, int, int] | None
    base: int
    mode: str
    base_witness: tuple[int, int, int, int] | None = None

    @property
    def delta(self) -> float:
        return self.delta_global if self.delta_global is not None else self.delta_base

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "base": self.base,
            "delta_base": self.delta_base,
            "delta_global": self.delta_global,
            "witness": list(self.witness) if self.witness else None,
            "base_witness": list(self.base_witness) if self.base_witness else None,
        }


def _ordered_quadruple(dist, i, j, k, l):
    """Arrange a 4-set as ``(x, y, z, p)`` with ``d(x,z)+d(y,p)`` the largest pair sum."""
    A = dist(i, j) + dist(k, l)
    B = dist(i, k) + dist(j, l)
    C = dist(i, l) + dist(j, k)
    if A >= B and A >= C:
        return (i, k, j, l)
    if B >= C:
        return (i, j, k, l)
    return (i, j, l, k)


def _base_delta(g: WeightedMetricGraph, p: int):
    value, x, y, z = kernels.delta_base(np.ascontiguousarray(g.distances), p)
    return max(0.0, value), (x, y, z, p)


def _blocks(g: WeightedMetricGraph) -> list[list[int]]:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((u, v) for u, v, _ in g.edges)
    return sorted((sorted(b) for b in nx.biconnected_components(G)), key=lambda b: (-len(b), b))


def _global_delta(g: WeightedMetricGraph, size_limit: int, force: bool):
    """Max over biconnected blocks; each block is convex, so its metric is induced."""
    if g.n < 4:
        return 0.0, None
    blocks = [b for b in _blocks(g) if len(b) >= 4]
    if blocks and len(blocks[0]) > size_limit and not force:
        raise ValueError(
            f"largest block has {len(blocks[0])} nodes > limit {size_limit}; pass force=True"
        )
    best, witness = -1.0, None
    for block in sorted(blocks):
        sub, order = g.induced(block)
        D = np.ascontiguousarray(sub.distances) if len(block) < g.n else np.ascontiguousarray(g.distances)
        value, x, y, z, p = kernels.delta_global(D)
        if value > best:
            best = value
            witness = (order[x], order[y], order[z], order[p])
    if witness is None:
        rows = {v: g.distances_from(v) for v in range(4)}
        witness = _ordered_quadruple(lambda a, b: rows[a][b], 0, 1, 2, 3)
        best = 0.0
    return max(0.0, best), witness


def estimate_delta(
    g: WeightedMetricGraph,
    mode: str = "global",
    base: int | None = None,
    size_limit: int = GLOBAL_SIZE_LIMIT,
    force: bool = False,
) -> HyperbolicityReport:
    """Four-point hyperbolicity constant.

    ``mode="base"`` scans all triples at one base point (O(n^3));
    ``mode="global"`` scans all quadruples (O(n^4) per biconnected block).
    """
    p = g.base if base is None else int(base)
    if mode == "base":
        value, wit = _base_delta(g, p)
        return HyperbolicityReport(value, None, None, p, mode, wit)
    if mode != "global":
        raise ValueError(f"unknown mode {mode!r}")
    delta, witness = _global_delta(g, size_limit, force)
    delta_base = base_wit = None
    if g.n <= BASE_SIZE_LIMIT:
        delta_base, base_wit = _base_delta(g, p)
    return HyperbolicityReport(delta_base, delta, witness, p, mode, base_wit)


# -- arc checks ---------------------------------------------------------------

def verify_tripod(g: WeightedMetricGraph, delta: float, h: float, a: int, b1: int, b2: int,
                  limit: int = 4) -> CheckRecord:
    """Tripod bounds |x1-x2| <= 4 delta + h and |x1-x2'| <= 4 delta + 2h.

    Every combination of up to ``limit`` h-short arcs a->b1, a->b2 is
    scanned.  Matching points are vertices; samples whose match is not exact
    (distance or arclength mismatch > TOL) are counted but not judged.
    """
    D = g.distances
    gp = gromov_product(D, b1, b2, a)
    arcs1 = h_short_arcs(g, a, b1, h, limit)
    arcs2 = h_short_arcs(g, a, b2, h, limit)
    max_same_dist = max_same_len = 0.0
    wit_dist = wit_len = None
    samples = unmatched = 0
    nontrivial = False
    for al1, al2 in itertools.product(arcs1, arcs2):
        d2 = np.array([D[a, v] for v in al2.nodes])
        c2 = np.asarray(al2.cum_length)
        for i, x1 in enumerate(al1.nodes):
            r = D[a, x1]
            if r > gp + TOL:
                continue
            samples += 1
            nontrivial = nontrivial or x1 != a
            j = int(np.argmin(np.abs(d2 - r)))
            if abs(d2[j] - r) <= TOL:
                dist = D[x1, al2.nodes[j]]
                if dist > max_same_dist or wit_dist is None:
                    max_same_dist, wit_dist = float(dist), (x1, al2.nodes[j])
            else:
                unmatched += 1
            j = int(np.argmin(np.abs(c2 - al1.cum_length[i])))
            if abs(c2[j] - al1.cum_length[i]) <= TOL:
                dist = D[x1, al2.nodes[j]]
                if dist > max_same_len or wit_len is None:
                    max_same_len, wit_len = float(dist), (x1, al2.nodes[j])
            else:
                unmatched += 1
    bound1, bound2 = 4 * delta + h, 4 * delta + 2 * h
    ok = max_same_dist <= bound1 + TOL and max_same_len <= bound2 + TOL
    flags = [] if nontrivial else ["vacuous"]
    if unmatched:
        flags.append("unmatched-samples")
    return CheckRecord(
        "tripod",
        status_of(ok),
        {
            "gromov_product": gp,
            "max_equal_distance_gap": max_same_dist,
            "max_equal_length_gap": max_same_len,
            "bound_distance": bound1,
            "bound_length": bound2,
            "slack_distance": bound1 - max_same_dist,
            "slack_length": bound2 - max_same_len,
            "samples": samples,
            "unmatched": unmatched,
            "arc_pairs": len(arcs1) * len(arcs2),
        },
        {"equal_distance": wit_dist, "equal_length": wit_len},
        flags,
    )


def verify_arc_monotonicity(g: WeightedMetricGraph, delta: float, h: float, arc: ArcPath, p: int) -> CheckRecord:
    """|p-u| - |p-z| >= |u-z| - 8 delta - 8h for z in arc[x, y_arc], u in arc[x, z].

    ``y_arc`` is the vertex set with ``l(arc[y_arc, y]) >= (x|p)_y``, i.e. the
    vertices no further than the exact cut point.
    """
    D = g.distances
    if not arc.is_h_short(g, h):
        raise ValueError(f"arc is not {h}-short (excess {arc.excess(g):.6g})")
    x, y = arc.first, arc.last
    cut = arc.length - gromov_product(D, x, p, y)
    nodes = np.asarray(arc.nodes)
    cum = np.asarray(arc.cum_length)
    upto = int(np.searchsorted(cum, cut + TOL, side="right"))
    if upto == 0:
        return CheckRecord("arc_monotonicity", status_of(True), {"pairs": 0}, None, ["vacuous"])
    zs = nodes[:upto]
    dp = D[p, zs]
    # rows u-index, columns z-index; keep u before z
    slack = (dp[:, None] - dp[None, :]) - (D[np.ix_(zs, zs)] - 8 * delta - 8 * h)
    mask = np.tri(upto, dtype=bool)  # u index <= z index
    masked = np.where(mask.T, slack, np.inf)
    k = int(np.argmin(masked))
    ui, zi = divmod(k, upto)
    worst = float(masked.flat[k])
    return CheckRecord(
        "arc_monotonicity",
        status_of(worst >= -TOL),
        {"min_slack": worst, "pairs": int(mask.sum()), "cut_length": cut, "bound_shift": 8 * delta + 8 * h},
        {"u": int(zs[ui]), "z": int(zs[zi])},
        [],
    )
