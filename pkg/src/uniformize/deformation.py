"""Conformal deformation by the density exp(-eps * d(x, p)) and its basic estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import TOL, ArcPath, WeightedMetricGraph
from .metric import estimate_delta
from .records import SKIPPED, CheckRecord, status_of

QUADRATURES = ("trapezoid", "exact-tree")
#: escape length factor: int_0^L e^{-eps t} dt >= 1/(e eps)  iff  eps L >= log(e / (e - 1))
ESCAPE_THRESHOLD = math.log(math.e / (math.e - 1.0))
DEFAULT_H = 1.0 / 14.0


@dataclass(frozen=True)
class DeformationParams:
    epsilon: float
    h: float = DEFAULT_H
    quadrature: str = "trapezoid"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.h < 0:
            raise ValueError("h must be nonnegative")
        if self.quadrature == "exact":
            object.__setattr__(self, "quadrature", "exact-tree")
        if self.quadrature not in QUADRATURES:
            raise ValueError(f"quadrature must be one of {QUADRATURES}")


def edge_integral(a: float, b: float, length: float, eps: float) -> float:
    """Exact integral of exp(-eps * dist_p) along an edge of the metric graph.

    ``a``, ``b`` are the endpoint distances to the base point; along the edge
    the distance is ``min(a + t, b + length - t)``, affine on trees.
    """
    peak = min(max((b + length - a) / 2.0, 0.0), length)
    first = -math.exp(-eps * a) * math.expm1(-eps * peak) / eps
    second = -math.exp(-eps * b) * math.expm1(-eps * (length - peak)) / eps
    return first + second


def trapezoid_factor(x: float) -> float:
    """Worst ratio trapezoid/exact for e^{-t} over a step of width ``x``: (x/2) coth(x/2)."""
    if x < 1e-6:
        return 1.0 + x * x / 12.0
    return (x / 2.0) / math.tanh(x / 2.0)


class DeformedSpace:
    """A graph together with its deformed edge lengths and deformed metric d_eps."""

    def __init__(self, graph: WeightedMetricGraph, params: DeformationParams, delta: float | None = None):
        self.graph = graph
        self.params = params
        eps = params.epsilon
        dp = graph.distances_from(graph.base)
        self.base_distance = np.asarray(dp, dtype=float)
        self.density = np.exp(-eps * self.base_distance)
        if params.quadrature == "trapezoid":
            weights = [w * (self.density[u] + self.density[v]) / 2.0 for u, v, w in graph.edges]
        else:
            weights = [edge_integral(dp[u], dp[v], w, eps) for u, v, w in graph.edges]
        self.weights = np.asarray(weights)
        meta = dict(graph.metadata, deformed_epsilon=eps, quadrature=params.quadrature)
        self.deformed = graph.reweighted(self.weights, meta)
        self._delta = delta

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def distances(self) -> np.ndarray:
        """The deformed metric d_eps."""
        return self.deformed.distances

    @cached_property
    def delta_report(self):
        return estimate_delta(self.graph, "global", force=True)

    @property
    def delta(self) -> float:
        """Hyperbolicity constant of the undeformed graph (measured unless supplied)."""
        if self._delta is None:
            self._delta = float(self.delta_report.delta_global)
        return self._delta

    def epsilon_policy(self) -> dict:
        """The hypothesis eps < min(1, 1/(5 delta)) evaluated with the measured delta."""
        delta = self.delta
        bound = 1.0 if delta == 0 else min(1.0, 1.0 / (5.0 * delta))
        return {"delta": delta, "epsilon": self.epsilon, "eps_times_delta": self.epsilon * delta,
                "epsilon_bound": bound, "satisfied": self.epsilon * delta < 0.2}

    @cached_property
    def truncation_radius(self) -> float:
        if not self.graph.frontier:
            raise ValueError("no boundary proxy: the graph has an empty frontier")
        return float(min(self.base_distance[f] for f in self.graph.frontier))

    @cached_property
    def frontier_deformed_distance(self) -> np.ndarray:
        """min over frontier nodes of d_eps(x, f), for every node x."""
        if not self.graph.frontier:
            raise ValueError("no boundary proxy: the graph has an empty frontier")
        return self.distances[:, list(self.graph.frontier)].min(axis=1)

    @cached_property
    def frontier_distance(self) -> np.ndarray:
        """Undeformed distance from each node to the frontier."""
        return self.graph.distances[:, list(self.graph.frontier)].min(axis=1)

    def arc_length(self, arc: ArcPath) -> np.ndarray:
        """Cumulative deformed length along ``arc`` (summed from its first node)."""
        return arc.weighted_cum(self.deformed)

    def inner_nodes(self, fraction: float = 0.5) -> list[int]:
        R = self.truncation_radius
        return [int(v) for v in np.flatnonzero(self.base_distance <= fraction * R + TOL)]


def deform(g: WeightedMetricGraph, params: DeformationParams | float, delta: float | None = None) -> DeformedSpace:
    if not isinstance(params, DeformationParams):
        params = DeformationParams(float(params))
    return DeformedSpace(g, params, delta)


# -- checks -------------------------------------------------------------------

def check_harnack(ds: DeformedSpace, chunk: int = 512) -> CheckRecord:
    """exp(-eps d) <= rho(x)/rho(y) <= exp(eps d) for all pairs; relative slack."""
    eps = ds.epsilon
    D = ds.graph.distances
    rho = ds.density
    worst, wit = math.inf, None
    for s in range(0, ds.graph.n, chunk):
        rows = slice(s, min(s + chunk, ds.graph.n))
        ratio = rho[rows, None] / rho[None, :]
        ed = eps * D[rows]
        lower = ratio * np.exp(ed) - 1.0  # ratio / exp(-eps d) - 1
        upper = 1.0 - ratio * np.exp(-ed)  # 1 - ratio / exp(eps d)
        slack = np.minimum(lower, upper)
        k = int(np.argmin(slack))
        if slack.flat[k] < worst:
            worst = float(slack.flat[k])
            i, j = divmod(k, ds.graph.n)
            wit = (s + i, j)
    return CheckRecord("harnack", status_of(worst >= -TOL), {"min_relative_slack": worst, "epsilon": eps}, wit)


def check_diameter(ds: DeformedSpace) -> CheckRecord:
    """diam d_eps <= 2 e^eps / eps."""
    D = ds.distances
    k = int(np.argmax(D))
    diam = float(D.flat[k])
    bound = 2.0 * math.exp(ds.epsilon) / ds.epsilon
    return CheckRecord(
        "diameter",
        status_of(diam <= bound + TOL),
        {"diameter": diam, "bound": bound, "slack": bound - diam, "epsilon": ds.epsilon},
        divmod(k, ds.graph.n),
    )


def check_local_bilipschitz(ds: DeformedSpace, w: int, radius: float = 1.0) -> CheckRecord:
    """e^{-5eps} rho(w) d <= d_eps <= 2 e^{5eps} rho(w) d on the closed ball B(w, radius).

    Closed so that unit-edge graphs have populated balls; a ball with one
    node passes vacuously and is flagged.
    """
    eps = ds.epsilon
    D = ds.graph.distances
    ball = np.flatnonzero(D[w] <= radius + TOL)
    values = {"ball_size": int(ball.size), "center": int(w), "epsilon": eps}
    if ball.size < 2:
        return CheckRecord("local_bilipschitz", status_of(True), values, None, ["vacuous"])
    d = D[np.ix_(ball, ball)]
    de = ds.distances[np.ix_(ball, ball)]
    lo = math.exp(-5 * eps) * ds.density[w] * d
    hi = 2.0 * math.exp(5 * eps) * ds.density[w] * d
    slack = np.minimum(de - lo, hi - de)
    k = int(np.argmin(slack))
    i, j = divmod(k, ball.size)
    off = ~np.eye(ball.size, dtype=bool)
    ratio = de[off] / (ds.density[w] * d[off])
    values.update(min_slack=float(slack.flat[k]), min_ratio=float(ratio.min()), max_ratio=float(ratio.max()),
                  lower_factor=math.exp(-5 * eps), upper_factor=2.0 * math.exp(5 * eps))
    return CheckRecord("local_bilipschitz", status_of(slack.flat[k] >= -TOL), values,
                       (int(ball[i]), int(ball[j])))


def boundary_distance(ds: DeformedSpace, x: int) -> tuple[float, float]:
    """Certified bracket for d_eps(x, boundary): frontier minimum, plus the tail beyond it."""
    lower = float(ds.frontier_deformed_distance[x])
    tail = math.exp(-ds.epsilon * ds.truncation_radius) / ds.epsilon
    return lower, lower + tail


def check_boundary_lower_bound(ds: DeformedSpace, fraction: float = 0.5) -> CheckRecord:
    """d_eps(x, boundary) >= rho(x) / (e eps) at inner nodes, judged on the lower bracket.

    Only nodes whose undeformed frontier distance L satisfies
    eps * L >= log(e/(e-1)) are judged: closer to the truncation the
    estimate's escape curve does not fit inside the finite graph.
    """
    if not ds.graph.frontier:
        return CheckRecord("boundary_lower_bound", SKIPPED, {}, None, ["no boundary proxy"])
    eps = ds.epsilon
    inner = np.asarray(ds.inner_nodes(fraction))
    reach = eps * ds.frontier_distance[inner] >= ESCAPE_THRESHOLD - TOL
    judged = inner[reach]
    values = {"inner_nodes": int(inner.size), "judged": int(judged.size),
              "truncated": int(inner.size - judged.size), "epsilon": eps,
              "truncation_radius": ds.truncation_radius}
    if judged.size == 0:
        return CheckRecord("boundary_lower_bound", SKIPPED, values, None, ["frontier too close"])
    lower = ds.frontier_deformed_distance[judged]
    bound = ds.density[judged] / (math.e * eps)
    slack = lower - bound
    k = int(np.argmin(slack))
    values.update(min_slack=float(slack[k]), min_ratio=float((lower / bound).min()))
    flags = ["truncated-nodes-excluded"] if judged.size < inner.size else []
    return CheckRecord("boundary_lower_bound", status_of(slack[k] >= -TOL), values, int(judged[k]), flags)


def check_incompleteness_cauchy(ds: DeformedSpace, ray: Sequence[int]) -> CheckRecord:
    """d_eps(u_n, u_m) <= q (1/eps) e^{eps K} e^{-eps t_n} for n <= m along a ray from p.

    K is the rough quasi-geodesic constant of the ray; ``q`` is 1 for exact
    quadrature and the trapezoid overshoot factor (x/2)coth(x/2) otherwise.
    """
    from .boundary import verify_rough_quasi_geodesic

    ray = [int(v) for v in ray]
    if len(ray) < 3:
        raise ValueError("ray needs at least 3 nodes")
    g = ds.graph
    if ray[0] != g.base:
        raise ValueError("ray must start at the base point")
    dp = ds.base_distance[ray]
    if np.any(np.diff(dp) <= 0):
        raise ValueError("ray must move strictly away from the base point")
    arc = ArcPath.from_nodes(g, ray)
    K = float(verify_rough_quasi_geodesic(g, arc).values["K_emp"])
    eps = ds.epsilon
    t = np.asarray(arc.cum_length)
    if ds.params.quadrature == "trapezoid":
        q = trapezoid_factor(eps * max(b - a for a, b in zip(t, t[1:])))
    else:
        q = 1.0
    De = ds.distances[np.ix_(ray, ray)]
    bound = q * np.exp(eps * K - eps * t) / eps
    slack = bound[:, None] - De
    slack = np.where(np.triu(np.ones_like(De, dtype=bool)), slack, np.inf)
    k = int(np.argmin(slack))
    n, m = divmod(k, len(ray))
    return CheckRecord(
        "incompleteness_cauchy",
        status_of(slack.flat[k] >= -TOL),
        {"K": K, "quadrature_factor": q, "min_slack": float(slack.flat[k]), "epsilon": eps,
         "tail_bound_at_end": float(bound[-1]), "length": float(t[-1])},
        (ray[n], ray[m]),
    )
