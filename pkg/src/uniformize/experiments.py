"""Check orchestration, radius sweeps and report emission."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .boundary import (
    build_boundary_proxies,
    build_road,
    check_boundary_quasi_isometry,
    check_gromov_to_cauchy,
    check_metametric_sandwich,
    check_product_distance,
    check_road,
    check_road_concatenations,
    companion_sequence,
    radial_ray,
)
from .config import RunConfig
from .deformation import (
    DeformationParams,
    DeformedSpace,
    check_boundary_lower_bound,
    check_diameter,
    check_harnack,
    check_incompleteness_cauchy,
    check_local_bilipschitz,
)
from .generators import generate
from .graph import WeightedMetricGraph
from .metric import estimate_delta
from .records import FAIL, INFO, PASS, SKIPPED, CheckRecord, relative_spread
from .uniformity import GH_H_LIMIT, sample_pairs, verify_gehring_hayman, verify_uniform

SCHEMA = "uniformize.report/1"
#: default stability thresholds (relative spread) for the radius sweeps
STABILITY = {"gehring-hayman": 0.20, "uniformity": 0.20, "product-distance": 0.20, "quasi-isometry": 0.25}

BOUNDARY_GATED = ("product-distance", "sandwich", "quasi-isometry")


def skipped(name: str, reason: str, **values) -> CheckRecord:
    return CheckRecord(name, SKIPPED, values, None, [reason])


def informational(g: WeightedMetricGraph) -> bool:
    """Grids and random graphs carry no hyperbolicity assumption."""
    return g.metadata.get("kind") in ("euclidean-grid", "random-gnp")


def origin_of(g: WeightedMetricGraph, cfg: RunConfig) -> int:
    if cfg.origin < 0:
        return g.base
    if cfg.origin >= g.n:
        raise ValueError(f"origin {cfg.origin} is not a node")
    return cfg.origin


def _far_frontier(g: WeightedMetricGraph, o: int, f0: int) -> int:
    """Frontier node with the smallest Gromov product against ``f0`` (lowest id on ties)."""
    D = g.distances
    F = np.asarray([f for f in g.frontier if f != f0])
    gp = (D[F, o] + D[f0, o] - D[F, f0]) / 2.0
    return int(F[int(np.argmin(gp))])


@dataclass
class SuiteResult:
    epsilon: float
    records: list[CheckRecord]
    csv: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "checks": [r.to_dict() for r in self.records]}


def run_suite(g: WeightedMetricGraph, cfg: RunConfig, eps: float, delta: float | None = None,
              checks=None) -> SuiteResult:
    """Run the enabled checks on ``g`` at one ``eps``."""
    from .uniformity import rows_to_csv

    checks = tuple(cfg.checks if checks is None else checks)
    ds = DeformedSpace(g, DeformationParams(eps, cfg.h, cfg.quadrature), delta)
    o = origin_of(g, cfg)
    info = informational(g)
    has_frontier = bool(g.frontier)
    recs: list[CheckRecord] = []
    csv: dict[str, str] = {}

    if "delta" in checks:
        rep = ds.delta_report
        recs.append(CheckRecord("hyperbolicity", INFO if info else PASS,
                                {"delta_global": rep.delta_global, "delta_base": rep.delta_base,
                                 **ds.epsilon_policy()},
                                {"global": rep.witness, "base": rep.base_witness}))
    if "harnack" in checks:
        recs.append(check_harnack(ds))
    if "diameter" in checks:
        recs.append(check_diameter(ds))
    if "bilipschitz" in checks:
        centers = [g.base]
        if has_frontier:
            inner = ds.inner_nodes()
            far = max(inner, key=lambda v: (ds.base_distance[v], -v))
            if far != g.base:
                centers.append(far)
        recs.extend(check_local_bilipschitz(ds, w) for w in centers)

    for name in ("boundary-lower", "cauchy", "uniformity", "roads", "product-distance",
                 "sandwich", "quasi-isometry", "gromov-cauchy"):
        if name in checks and not has_frontier:
            recs.append(skipped(name.replace("-", "_"), "no boundary proxy"))
    policy = ds.epsilon_policy()

    if has_frontier:
        f0 = g.frontier[0]
        if "boundary-lower" in checks:
            recs.append(check_boundary_lower_bound(ds))
        if "cauchy" in checks:
            recs.append(check_incompleteness_cauchy(ds, radial_ray(g, g.base, f0)))
        if "uniformity" in checks:
            rep = verify_uniform(ds, sample_pairs(g, cfg.region, cfg.seed, sample_size=cfg.pairs),
                                 cfg.h, informational=info)
            recs.append(rep.record())
            csv["uniformity"] = rep.to_csv()
    if "gehring-hayman" in checks:
        if cfg.h >= GH_H_LIMIT:
            recs.append(skipped("gehring_hayman", "h >= 1/13", h=cfg.h))
        else:
            rec = verify_gehring_hayman(ds, sample_pairs(g, "all", cfg.seed, sample_size=cfg.pairs), cfg.h)
            if info and rec.status == PASS:
                rec.status = INFO
            recs.append(rec)
            csv["gehring_hayman"] = rows_to_csv(rec.rows)
    if not has_frontier:
        return SuiteResult(eps, recs, csv)

    if "roads" in checks:
        stages = max(1, min(10, int(round(ds.truncation_radius))))
        for perturb in (False, True):
            road = build_road(g, o, f0, stages, h=cfg.h if perturb else 0.0, perturb=perturb)
            r1 = check_road(g, road, ds.delta)
            r2 = check_road_concatenations(g, road)
            tag = "perturbed" if perturb else "geodesic"
            for r in (r1, r2):
                r.name = f"{r.name}_{tag}"
                if info and r.status == FAIL:
                    r.status = INFO
            recs.extend((r1, r2))

    gated = not policy["satisfied"]
    reason = f"eps*delta = {policy['eps_times_delta']:.6g} >= 1/5"
    if "product-distance" in checks:
        if gated:
            recs.append(skipped("product_distance", reason))
        else:
            rec = check_product_distance(ds, sample_pairs(g, "all", cfg.seed, sample_size=cfg.pairs), o)
            recs.append(rec)
            csv["product_distance"] = rows_to_csv(rec.rows)
    if gated:
        for name in ("sandwich", "quasi-isometry"):
            if name in checks:
                recs.append(skipped(name.replace("-", "_"), reason))
    elif "sandwich" in checks or "quasi-isometry" in checks:
        proxies = build_boundary_proxies(ds, o)
        if "sandwich" in checks:
            recs.append(check_metametric_sandwich(proxies))
        if "quasi-isometry" in checks:
            rec = check_boundary_quasi_isometry(ds, proxies)
            recs.append(rec)
            csv["boundary_quasi_isometry"] = rows_to_csv(rec.rows)

    if "gromov-cauchy" in checks:
        if len(g.frontier) < 2:
            recs.append(skipped("gromov_to_cauchy", "fewer than two frontier nodes"))
        else:
            u = radial_ray(g, o, f0)
            pairs = {"equivalent": companion_sequence(g, u, o),
                     "separated": radial_ray(g, o, _far_frontier(g, o, f0))}
            for tag, v in pairs.items():
                rec = check_gromov_to_cauchy(ds, u, v, o)
                rec.name = f"gromov_to_cauchy_{tag}"
                if rec.values["equivalent"] != (tag == "equivalent"):
                    rec.status = FAIL
                    rec.flags.append("misclassified")
                if info and rec.status == FAIL:
                    rec.status = INFO
                recs.append(rec)
    return SuiteResult(eps, recs, csv)


# -- radius sweeps ------------------------------------------------------------

def _measure(g: WeightedMetricGraph, cfg: RunConfig, eps: float, what: str) -> CheckRecord:
    ds = DeformedSpace(g, DeformationParams(eps, cfg.h, cfg.quadrature))
    if what == "gehring-hayman":
        return verify_gehring_hayman(ds, sample_pairs(g, "all", cfg.seed, sample_size=cfg.pairs), cfg.h)
    if what == "uniformity":
        return verify_uniform(ds, sample_pairs(g, cfg.region, cfg.seed, sample_size=cfg.pairs), cfg.h).record()
    if not ds.epsilon_policy()["satisfied"]:
        return skipped(what, "eps*delta >= 1/5")
    if what == "product-distance":
        return check_product_distance(ds, sample_pairs(g, "all", cfg.seed, sample_size=cfg.pairs),
                                      origin_of(g, cfg))
    if what == "quasi-isometry":
        return check_boundary_quasi_isometry(ds, build_boundary_proxies(ds, origin_of(g, cfg)))
    raise ValueError(f"unknown sweep measure {what!r}")


SWEEP_VALUE = {"gehring-hayman": "K_emp", "uniformity": "A", "product-distance": "C_emp",
               "quasi-isometry": "M_emp"}


def radius_sweep(cfg: RunConfig, radii, eps: float, what: str, threshold: float | None = None) -> CheckRecord:
    """Measure one constant at each truncation radius; PASS iff finite and spread < threshold."""
    if what not in SWEEP_VALUE:
        raise ValueError(f"unknown sweep measure {what!r}; expected one of {', '.join(SWEEP_VALUE)}")
    threshold = STABILITY[what] if threshold is None else threshold
    key = SWEEP_VALUE[what]
    per, flags, failed = {}, [], []
    for R in radii:
        rec = _measure(generate(cfg.with_overrides(radius=int(R)).generator_spec()), cfg, eps, what)
        if rec.status == SKIPPED:
            return skipped(f"stability_{what.replace('-', '_')}", f"radius {R}: {rec.flags[0]}",
                           radii=list(radii), epsilon=eps)
        per[int(R)] = float(rec.values[key])
        flags.extend(f"radius {R}: {f}" for f in rec.flags)
        if rec.failed:
            failed.append(int(R))
    values_ = list(per.values())
    spread = relative_spread(values_)
    finite = all(math.isfinite(v) for v in values_)
    values = {"measure": key, "per_radius": per, "relative_spread": spread, "threshold": threshold,
              "epsilon": eps, "failed_radii": failed}
    ok = finite and spread < threshold and not failed
    return CheckRecord(f"stability_{what.replace('-', '_')}", PASS if ok else FAIL, values, None, flags)


# -- reports ------------------------------------------------------------------

def summarize(records) -> dict:
    out = {PASS: 0, FAIL: 0, SKIPPED: 0, INFO: 0}
    for r in records:
        out[r.status] += 1
    return out


def build_report(command: str, cfg: RunConfig, graph: WeightedMetricGraph | None, runs=(), extra=()) -> dict:
    records = [r for run in runs for r in run.records] + list(extra)
    # thread count only affects speed; it is recorded in the header
    config = {k: v for k, v in cfg.to_dict().items() if k != "threads"}
    report = {"schema": SCHEMA, "command": command, "config": config}
    if graph is not None:
        report["graph"] = {"nodes": graph.n, "edges": len(graph.edges), "base": graph.base,
                           "frontier_size": len(graph.frontier), "metadata": graph.metadata}
    report["runs"] = [run.to_dict() for run in runs]
    if extra:
        report["checks"] = [r.to_dict() for r in extra]
    report["summary"] = summarize(records)
    return report


def header(command: str) -> dict:
    """Run metadata that may vary between identical runs; kept out of the report body."""
    from datetime import datetime, timezone

    from . import __version__

    return {"schema": SCHEMA, "command": command, "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "backend": kernels.BACKEND, "threads": kernels.get_threads()}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_report(out_dir: str, command: str, report: dict, csv: dict[str, str] | None = None) -> list[str]:
    """``<command>.json`` (deterministic), ``<command>.header.json`` and any CSV tables."""
    os.makedirs(out_dir, exist_ok=True)
    stem = command.replace("-", "_")
    written = []

    def put(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)

    put(f"{stem}.json", dumps(report))
    put(f"{stem}.header.json", dumps(header(command)))
    for key, text in sorted((csv or {}).items()):
        if text:
            put(f"{stem}_{key}.csv", text)
    return written
