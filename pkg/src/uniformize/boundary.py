"""Roads, rough quasi-geodesics, boundary proxies and the boundary comparisons."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .graph import TOL, ArcPath, WeightedMetricGraph
from .metric import h_short_arcs, shortest_arc
from .records import INFO, CheckRecord, status_of


def verify_rough_quasi_geodesic(g: WeightedMetricGraph, path: ArcPath, pairs=None,
                                mu: float | None = None, h: float | None = None) -> CheckRecord:
    """K_emp = max(0, |s-t| - d(path(s), path(t))) over vertex parameters.

    Also asserts the arclength upper branch d <= |s-t|.  When ``mu`` and
    ``h`` are given the concatenation bound K_emp <= 3 mu + 3 h is judged.
    """
    nodes = np.asarray(path.nodes)
    t = np.asarray(path.cum_length)
    D = g.distances[np.ix_(nodes, nodes)]
    gap = np.abs(t[:, None] - t[None, :])
    if pairs is not None:
        mask = np.zeros_like(D, dtype=bool)
        for i, j in pairs:
            mask[i, j] = mask[j, i] = True
    else:
        mask = np.ones_like(D, dtype=bool)
    lower = np.where(mask, gap - D, -np.inf)
    upper = np.where(mask, D - gap, -np.inf)
    k = int(np.argmax(lower))
    K = max(0.0, float(lower.flat[k]))
    upper_violation = float(upper.max())
    values = {"K_emp": K, "upper_violation": max(0.0, upper_violation), "length": float(t[-1])}
    ok = upper_violation <= TOL
    if mu is not None:
        hh = 0.0 if h is None else h
        values["bound"] = 3 * mu + 3 * hh
        ok = ok and K <= values["bound"] + TOL
    i, j = divmod(k, len(nodes))
    return CheckRecord("rough_quasi_geodesic", status_of(ok), values,
                       {"s": float(t[i]), "t": float(t[j]), "nodes": (int(nodes[i]), int(nodes[j]))})


# -- roads --------------------------------------------------------------------

@dataclass
class Road:
    origin: int
    direction: int
    arcs: list[ArcPath]
    h: float
    mu: float = 0.0
    mu_witness: tuple | None = None
    parameter_gap: float = 0.0

    @property
    def ends(self) -> list[int]:
        return [a.last for a in self.arcs]


def _length_map_index(src: ArcPath, dst: ArcPath, i: int) -> int:
    return dst.index_at(src.cum_length[i])


def measure_road(g: WeightedMetricGraph, arcs: Sequence[ArcPath]):
    """Largest displacement |g_ij x - x| of the length maps, i <= j."""
    D = g.distances
    mu, wit, gap = 0.0, None, 0.0
    for i, ai in enumerate(arcs):
        for j in range(i + 1, len(arcs)):
            aj = arcs[j]
            for k, x in enumerate(ai.nodes):
                kk = _length_map_index(ai, aj, k)
                gap = max(gap, abs(aj.cum_length[kk] - ai.cum_length[k]))
                d = D[x, aj.nodes[kk]]
                if d > mu:
                    mu, wit = float(d), (i, j, int(x), int(aj.nodes[kk]))
    return mu, wit, gap


def build_road(g: WeightedMetricGraph, o: int, direction: int, stages: int,
               h: float = 0.0, perturb: bool = False, limit: int = 8) -> Road:
    """Arcs o -> u_i with u_i spread along the shortest arc o -> direction.

    With ``perturb`` each arc is the longest of the first ``limit`` h-short
    arcs instead of the shortest one.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    if not 0 <= direction < g.n or not np.isfinite(g.distance(o, direction)):
        raise ValueError(f"direction {direction} is unreachable")
    spine = shortest_arc(g, o, direction)
    L = spine.length
    if L <= 0:
        raise ValueError("direction coincides with the origin")
    idx = []
    for i in range(1, stages + 1):
        k = spine.index_at(i * L / stages)
        if k > 0 and (not idx or k > idx[-1]):
            idx.append(k)
    arcs = []
    for k in idx:
        u = spine.nodes[k]
        arc = h_short_arcs(g, o, u, h, limit)[-1] if perturb else shortest_arc(g, o, u)
        if arcs and arc.length <= arcs[-1].length:
            continue
        arcs.append(arc)
    mu, wit, gap = measure_road(g, arcs)
    return Road(o, direction, arcs, h, mu, wit, gap)


def check_road(g: WeightedMetricGraph, road: Road, delta: float) -> CheckRecord:
    """mu <= 4 delta + 2h and every arc h-short."""
    bound = 4 * delta + 2 * road.h
    short = all(a.is_h_short(g, road.h) for a in road.arcs)
    increasing = all(b.length > a.length for a, b in zip(road.arcs, road.arcs[1:]))
    flags = ["parameter-gap"] if road.parameter_gap > TOL else []
    return CheckRecord(
        "road",
        status_of(short and increasing and road.mu <= bound + TOL),
        {"mu": road.mu, "bound": bound, "stages": len(road.arcs), "h": road.h,
         "parameter_gap": road.parameter_gap},
        road.mu_witness,
        flags,
    )


def concatenate_road_arcs(g: WeightedMetricGraph, road: Road, n: int, m: int) -> ArcPath:
    """alpha_n, then a shortest connector u_n -> g_nm(u_n), then the tail of alpha_m."""
    if not 0 <= n <= m < len(road.arcs):
        raise ValueError("need 0 <= n <= m < number of arcs")
    an, am = road.arcs[n], road.arcs[m]
    if n == m:
        return an
    j = am.index_at(an.length)
    target = am.nodes[j]
    beta = shortest_arc(g, an.last, target)
    lam = beta.length
    if lam > road.mu + road.h + TOL:
        raise ValueError(f"connector length {lam} exceeds mu + h = {road.mu + road.h}")
    nodes = an.nodes + beta.nodes[1:] + am.nodes[j + 1:]
    return ArcPath.from_nodes(g, nodes)


def check_road_concatenations(g: WeightedMetricGraph, road: Road) -> CheckRecord:
    """Every concatenation (n < m) is a rough (1, K) quasi-geodesic with K <= 3 mu + 3 h."""
    bound = 3 * road.mu + 3 * road.h
    worst_k, wit, tested, failures = 0.0, None, 0, []
    for n in range(len(road.arcs)):
        for m in range(n + 1, len(road.arcs)):
            try:
                arc = concatenate_road_arcs(g, road, n, m)
            except ValueError:
                failures.append((n, m))
                continue
            rec = verify_rough_quasi_geodesic(g, arc, mu=road.mu, h=road.h)
            tested += 1
            if rec.failed:
                failures.append((n, m))
            if rec.values["K_emp"] > worst_k or wit is None:
                worst_k, wit = max(worst_k, rec.values["K_emp"]), (n, m)
    values = {"K_emp": worst_k, "bound": bound, "mu": road.mu, "h": road.h,
              "concatenations": tested, "failures": len(failures)}
    flags = [] if tested else ["vacuous"]
    return CheckRecord("road_concatenation", status_of(not failures), values,
                       failures[0] if failures else wit, flags)


# -- product-distance comparison ---------------------------------------------

def product_distance_model(eps: float, gp, d):
    """e^{-eps (x|y)_p} min(1/2, eps |x-y|) / eps."""
    return np.exp(-eps * np.asarray(gp)) * np.minimum(0.5, eps * np.asarray(d)) / eps


def check_product_distance(ds, pairs: Sequence[tuple[int, int]], p: int | None = None) -> CheckRecord:
    """C_emp = max over pairs of max(r, 1/r), r = model / d_eps."""
    g = ds.graph
    p = g.base if p is None else p
    eps = ds.epsilon
    pairs = [(int(x), int(y)) for x, y in pairs]
    degenerate = sum(1 for x, y in pairs if x == y)
    pairs = [(x, y) for x, y in pairs if x != y]
    if not pairs:
        raise ValueError("pair sample is empty")
    xs = np.array([x for x, _ in pairs])
    ys = np.array([y for _, y in pairs])
    D = g.distances
    d = D[xs, ys]
    de = ds.distances[xs, ys]
    if np.any(de <= 0):
        raise ValueError("d_eps vanishes on a pair of distinct nodes")
    gp = (D[xs, p] + D[ys, p] - d) / 2.0
    r = product_distance_model(eps, gp, d) / de
    c = np.maximum(r, 1.0 / r)
    near = eps * d <= 0.5 + TOL
    k = int(np.argmax(c))
    values = {
        "C_emp": float(c[k]),
        "C_near": float(c[near].max()) if near.any() else None,
        "C_far": float(c[~near].max()) if (~near).any() else None,
        "r_min": float(r.min()),
        "r_max": float(r.max()),
        "near_pairs": int(near.sum()),
        "far_pairs": int((~near).sum()),
        "degenerate": degenerate,
        "epsilon": eps,
    }
    flags = []
    if not near.any() or near.all():
        flags.append("branch-unpopulated")
    policy = ds.epsilon_policy()
    values["eps_times_delta"] = policy["eps_times_delta"]
    if not policy["satisfied"]:
        flags.append("hypothesis-not-met")
    ok = bool(np.isfinite(c[k])) and "branch-unpopulated" not in flags
    status = status_of(ok) if policy["satisfied"] else INFO
    rows = [{"x": int(a), "y": int(b), "d": float(dd), "gromov_product": float(q), "d_eps": float(e),
             "ratio": float(rr)} for a, b, dd, q, e, rr in zip(xs, ys, d, gp, de, r)]
    return CheckRecord("product_distance", status, values, pairs[k], flags, rows)


SANDWICH_BINS = 10


# -- boundary proxies ---------------------------------------------------------

@dataclass
class BoundaryProxySet:
    origin: int
    proxies: np.ndarray
    tau: np.ndarray
    theta: np.ndarray
    epsilon: float
    flags: list[str] = field(default_factory=list)


def chain_closure(weights: np.ndarray) -> np.ndarray:
    """Infimum over chains of one or more steps (Floyd–Warshall without a zero diagonal)."""
    return kernels.chain_closure(np.ascontiguousarray(weights, dtype=float))


def build_boundary_proxies(ds, o: int | None = None) -> BoundaryProxySet:
    """tau = exp(-eps (x|y)_o) on frontier nodes and its chain closure theta."""
    g = ds.graph
    if not g.frontier:
        raise ValueError("no boundary proxy: the graph has an empty frontier")
    policy = ds.epsilon_policy()
    if not policy["satisfied"]:
        raise ValueError(f"eps * delta = {policy['eps_times_delta']:.4g} >= 1/5; boundary metametric undefined")
    o = g.base if o is None else int(o)
    flags = [] if o == g.base else ["origin-differs-from-density-base"]
    P = np.asarray(g.frontier)
    D = g.distances
    col = D[P, o]
    gp = (col[:, None] + col[None, :] - D[np.ix_(P, P)]) / 2.0
    tau = np.exp(-ds.epsilon * gp)
    return BoundaryProxySet(o, P, tau, chain_closure(tau), ds.epsilon, flags)


def check_metametric_sandwich(proxies: BoundaryProxySet) -> CheckRecord:
    """tau/2 <= theta <= tau and the triangle inequality for theta."""
    tau, theta = proxies.tau, proxies.theta
    lo = theta - tau / 2.0
    hi = tau - theta
    k_lo = int(np.argmin(lo))
    n = tau.shape[0]
    tri = max(0.0, kernels.triangle_violation(np.ascontiguousarray(theta)))
    off = ~np.eye(n, dtype=bool)
    ratio = theta[off] / tau[off]
    counts, edges = np.histogram(ratio, bins=SANDWICH_BINS, range=(0.5, 1.0))
    values = {"min_lower_slack": float(lo.flat[k_lo]), "min_upper_slack": float(hi.min()),
              "triangle_violation": max(0.0, tri), "proxies": n,
              "min_theta_over_tau": float(ratio.min()) if ratio.size else 1.0,
              # theta/tau of distinct proxies; the sandwich confines it to [1/2, 1]
              "theta_over_tau_histogram": {"edges": edges.tolist(), "counts": counts.tolist(),
                                           "outside": int(ratio.size - counts.sum())}}
    ok = values["min_lower_slack"] >= -TOL and values["min_upper_slack"] >= -TOL and tri <= TOL
    i, j = divmod(k_lo, n)
    return CheckRecord("metametric_sandwich", status_of(ok), values,
                       (int(proxies.proxies[i]), int(proxies.proxies[j])), list(proxies.flags))


def check_boundary_quasi_isometry(ds, proxies: BoundaryProxySet) -> CheckRecord:
    """M_emp = max over distinct proxy pairs of max(theta/d_eps, d_eps/theta)."""
    P = proxies.proxies
    if P.size < 2:
        raise ValueError("need at least two boundary proxies")
    iu = np.triu_indices(P.size, 1)
    de = ds.distances[np.ix_(P, P)][iu]
    th = proxies.theta[iu]
    ratio = de / th
    m = np.maximum(ratio, 1.0 / ratio)
    k = int(np.argmax(m))
    values = {"M_emp": float(m[k]), "d_over_theta_min": float(ratio.min()),
              "d_over_theta_max": float(ratio.max()), "pairs": int(m.size), "epsilon": ds.epsilon}
    rows = [{"x": int(a), "y": int(b), "theta": float(t), "d_eps": float(e), "ratio": float(q)}
            for a, b, t, e, q in zip(P[iu[0]], P[iu[1]], th, de, ratio)]
    return CheckRecord("boundary_quasi_isometry", status_of(bool(np.isfinite(m[k]))), values,
                       (int(P[iu[0][k]]), int(P[iu[1][k]])), list(proxies.flags), rows)


# -- Gromov sequences and rays ------------------------------------------------

def radial_ray(g: WeightedMetricGraph, o: int, target: int) -> list[int]:
    """Vertices of the shortest arc from ``o`` to ``target``."""
    return list(shortest_arc(g, o, target).nodes)


def companion_sequence(g: WeightedMetricGraph, ray: Sequence[int], o: int | None = None) -> list[int]:
    """For each u_n, the node v != u_n at the same distance from o maximising (u_n|v)_o.

    Starts at index 1; the result is an equivalent Gromov sequence when the
    ray escapes.  Ties go to the smallest node id.
    """
    o = g.base if o is None else o
    D = g.distances
    out = [int(ray[0])]
    for u in ray[1:]:
        same = np.flatnonzero(np.abs(D[o] - D[o, u]) <= TOL)
        same = same[same != u]
        if same.size == 0:
            out.append(int(u))
            continue
        gp = (D[u, o] + D[same, o] - D[u, same]) / 2.0
        out.append(int(same[int(np.argmax(gp))]))
    return out


def check_gromov_to_cauchy(ds, u: Sequence[int], v: Sequence[int], o: int | None = None,
                           C: float | None = None, growth: float = 0.5) -> CheckRecord:
    """Gromov products along two sequences versus their deformed distances.

    The pair is classified equivalent when (u_n|v_n)_o grows over the second
    half of the sequence at least ``growth`` times as fast as the radius.
    Equivalent pairs must have nonincreasing d_eps(u_n, v_n); non-equivalent
    pairs must keep d_eps bounded away from 0 over the second half.
    """
    g = ds.graph
    o = g.base if o is None else int(o)
    u = [int(a) for a in u]
    v = [int(a) for a in v]
    if len(u) < 3 or len(v) < 3:
        raise ValueError("sequences need at least 3 nodes")
    N = min(len(u), len(v))
    u, v = u[:N], v[:N]
    D = g.distances
    De = ds.distances

    def gp(a, b):
        return (D[a, o] + D[b, o] - D[a, b]) / 2.0

    own_u = [gp(u[i], u[i + 1]) for i in range(N - 1)]
    own_v = [gp(v[i], v[i + 1]) for i in range(N - 1)]
    mono = bool(np.all(np.diff(own_u) >= -TOL) and np.all(np.diff(own_v) >= -TOL))
    cross = np.array([gp(a, b) for a, b in zip(u, v)])
    dist = np.array([De[a, b] for a, b in zip(u, v)])
    radius = np.array([min(D[o, a], D[o, b]) for a, b in zip(u, v)])
    half = N // 2
    rise = cross[-1] - cross[half]
    equivalent = bool(rise >= growth * (radius[-1] - radius[half]) - TOL and rise > TOL)
    tail = dist[half:]
    if equivalent:
        start = int(np.argmax(dist > 0)) if np.any(dist > 0) else N
        ok_seq = bool(np.all(np.diff(dist[start:]) <= TOL))
    else:
        ok_seq = bool(tail.min() > TOL)
    values = {
        "equivalent": equivalent,
        "gromov_products": cross.tolist(),
        "deformed_distances": dist.tolist(),
        "own_products_monotone": mono,
        "tail_min_distance": float(tail.min()),
        "final_distance": float(dist[-1]),
    }
    if C is not None:
        model = product_distance_model(ds.epsilon, cross, [D[a, b] for a, b in zip(u, v)])
        nz = dist > 0
        values["model_consistent"] = bool(np.all(dist[nz] <= C * model[nz] * (1 + 1e-12)))
    return CheckRecord("gromov_to_cauchy", status_of(mono and ok_seq), values, (u[-1], v[-1]))
