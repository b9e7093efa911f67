"""Uniformity of the deformed space along original-metric arcs, and Gehring–Hayman ratios."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .deformation import DEFAULT_H, DeformedSpace
from .graph import TOL, WeightedMetricGraph
from .metric import gromov_product, shortest_arc
from .records import INFO, CheckRecord, status_of

#: below this many candidate nodes every pair is used
ALL_PAIRS_LIMIT = 200
SAMPLE_SIZE = 5000
GH_H_LIMIT = 1.0 / 13.0


def sample_pairs(g: WeightedMetricGraph, region: str = "all", seed: int = 0,
                 all_pairs_limit: int = ALL_PAIRS_LIMIT, sample_size: int = SAMPLE_SIZE) -> list[tuple[int, int]]:
    """Unordered node pairs ``(x, y)`` with ``x < y``, sorted.

    ``region="inner"`` restricts to nodes within half the truncation radius
    of the base point.  Large candidate sets are sampled with a seeded RNG
    and, for ``region="all"``, topped up with every (base, frontier) pair.
    """
    d = g.distances_from(g.base)
    if region == "inner":
        if not g.frontier:
            raise ValueError("inner region needs a frontier")
        R = min(d[f] for f in g.frontier)
        nodes = [v for v in range(g.n) if d[v] <= R / 2 + TOL]
    elif region == "all":
        nodes = list(range(g.n))
    else:
        raise ValueError(f"unknown region {region!r}")
    if len(nodes) <= all_pairs_limit:
        return [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]
    rng = np.random.default_rng(seed)
    arr = np.asarray(nodes)
    pairs = set()
    while len(pairs) < sample_size:
        a, b = rng.choice(arr, size=2, replace=False)
        pairs.add((int(min(a, b)), int(max(a, b))))
    if region == "all":
        p = g.base
        pairs.update((min(p, f), max(p, f)) for f in g.frontier if f != p)
    return sorted(pairs)


def pair_ratios(ds: DeformedSpace, x: int, y: int) -> dict:
    """Quasiconvexity and double-cone ratios of the shortest arc x -> y in d_eps.

    The cone ratio at z divides min(l_eps(arc[x,z]), l_eps(arc[z,y])) by the
    certified lower bound for the deformed boundary distance of z.
    ``first_half`` covers z in arc[x, y_arc] with l(arc[y_arc, y]) = (x|p)_y.
    """
    g = ds.graph
    arc = shortest_arc(g, x, y)
    cum = ds.arc_length(arc)
    total = float(cum[-1])
    de = float(ds.distances[x, y])
    qc = total / de
    lower = ds.frontier_deformed_distance
    cut = arc.length - gromov_product(g.distances, x, g.base, y)
    worst = {True: (0.0, x), False: (0.0, x)}
    for k, z in enumerate(arc.nodes):
        num = min(float(cum[k]), total - float(cum[k]))
        if num <= 0:
            ratio = 0.0
        elif lower[z] <= 0:
            ratio = math.inf
        else:
            ratio = num / float(lower[z])
        first = arc.cum_length[k] <= cut + TOL
        if ratio > worst[first][0]:
            worst[first] = (ratio, int(z))
    cone, z = max(worst[True], worst[False], key=lambda t: t[0])
    return {
        "x": int(x), "y": int(y),
        "d": float(g.distances[x, y]), "d_eps": de, "arc_length_eps": total,
        "quasiconvex": qc, "cone": cone, "cone_z": z,
        "cone_first_half": worst[True][0], "cone_second_half": worst[False][0],
    }


@dataclass
class UniformityReport:
    epsilon: float
    h: float
    delta: float
    rows: list[dict]
    degenerate: int
    A_quasiconvex: float
    A_cone: float
    A_cone_first_half: float
    A_cone_second_half: float
    bound: float
    witness_quasiconvex: tuple | None
    witness_cone: tuple | None
    informational: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def A(self) -> float:
        return max(self.A_quasiconvex, self.A_cone)

    def record(self) -> CheckRecord:
        values = {
            "A": self.A, "A_quasiconvex": self.A_quasiconvex, "A_cone": self.A_cone,
            "A_cone_first_half": self.A_cone_first_half, "A_cone_second_half": self.A_cone_second_half,
            "cone_bound": self.bound, "delta": self.delta, "h": self.h, "epsilon": self.epsilon,
            "pairs": len(self.rows), "degenerate": self.degenerate,
        }
        ok = self.A_quasiconvex >= 1 - TOL and self.A_cone <= self.bound + TOL
        status = INFO if self.informational else status_of(ok)
        return CheckRecord("uniformity", status, values,
                           {"quasiconvex": self.witness_quasiconvex, "cone": self.witness_cone}, self.flags)

    def to_csv(self) -> str:
        return rows_to_csv(self.rows)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return out.getvalue()


def verify_uniform(ds: DeformedSpace, pairs, h: float = DEFAULT_H, informational: bool = False) -> UniformityReport:
    """Both uniformity conditions along original-metric shortest arcs.

    The cone aggregate is compared with exp(delta eps + 9 h eps + 1), delta
    being the measured global hyperbolicity constant.
    """
    if not ds.graph.frontier:
        raise ValueError("no boundary proxy: the graph has an empty frontier")
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pair sample is empty")
    rows, degenerate = [], 0
    for x, y in pairs:
        if x == y:
            degenerate += 1
            continue
        rows.append(pair_ratios(ds, min(x, y), max(x, y)))
    if not rows:
        raise ValueError("pair sample has only degenerate pairs")
    delta = 0.0 if informational else ds.delta
    eps = ds.epsilon
    bound = math.exp(delta * eps + 9 * h * eps + 1)
    iq = max(range(len(rows)), key=lambda i: rows[i]["quasiconvex"])
    ic = max(range(len(rows)), key=lambda i: rows[i]["cone"])
    return UniformityReport(
        epsilon=eps, h=h, delta=delta, rows=rows, degenerate=degenerate,
        A_quasiconvex=rows[iq]["quasiconvex"], A_cone=rows[ic]["cone"],
        A_cone_first_half=max(r["cone_first_half"] for r in rows),
        A_cone_second_half=max(r["cone_second_half"] for r in rows),
        bound=bound,
        witness_quasiconvex=(rows[iq]["x"], rows[iq]["y"]),
        witness_cone=(rows[ic]["x"], rows[ic]["y"], rows[ic]["cone_z"]),
        informational=informational,
        flags=["informational"] if informational else [],
    )


def verify_gehring_hayman(ds: DeformedSpace, pairs, h: float = DEFAULT_H) -> CheckRecord:
    """K_emp(x, y) = l_eps(arc) / d_eps(x, y) for the original shortest arc."""
    if h >= GH_H_LIMIT:
        raise ValueError(f"h = {h} must be < 1/13")
    best, wit, count, rows = 0.0, None, 0, []
    for x, y in pairs:
        if x == y:
            continue
        x, y = min(x, y), max(x, y)
        arc = shortest_arc(ds.graph, x, y)
        ratio = float(ds.arc_length(arc)[-1]) / float(ds.distances[x, y])
        rows.append({"x": x, "y": y, "K": ratio})
        count += 1
        if ratio > best:
            best, wit = ratio, (x, y)
    if count == 0:
        raise ValueError("pair sample is empty")
    return CheckRecord("gehring_hayman", status_of(math.isfinite(best) and best >= 1 - TOL),
                       {"K_emp": best, "pairs": count, "h": h, "epsilon": ds.epsilon}, wit, rows=rows)
