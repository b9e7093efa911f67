import json
import math

import pytest

from uniformize.config import RunConfig
from uniformize.experiments import build_report, dumps, radius_sweep, run_suite, write_report
from uniformize.generators import generate
from uniformize.records import FAIL, INFO, PASS, SKIPPED, CheckRecord, relative_spread, status_of


def _statuses(res):
    return {r.name: r.status for r in res.records}


def test_tree_suite_all_pass():
    cfg = RunConfig()
    res = run_suite(generate(cfg.generator_spec()), cfg, 0.5)
    st = _statuses(res)
    assert set(st.values()) == {PASS}
    assert len(res.records) == 18
    assert set(res.csv) == {"uniformity", "gehring_hayman", "product_distance", "boundary_quasi_isometry"}


def test_grid_uniformity_is_informational():
    cfg = RunConfig(kind="euclidean-grid", n=8, eps=(0.5,))
    st = _statuses(run_suite(generate(cfg.generator_spec()), cfg, 0.5))
    assert st["uniformity"] == INFO and st["gehring_hayman"] == INFO
    assert st["product_distance"] == SKIPPED and st["sandwich"] == SKIPPED
    assert FAIL not in st.values()


def test_gated_boundary_checks_skip_not_fail():
    cfg = RunConfig(kind="hyperbolic-tiling", radius=4)
    res = run_suite(generate(cfg.generator_spec()), cfg, 0.3)
    skipped = {r.name: r.flags for r in res.records if r.status == SKIPPED}
    assert set(skipped) >= {"product_distance", "sandwich", "quasi_isometry"}
    assert all("1/5" in f[0] for f in skipped.values())


def test_tiling_below_gate_runs_boundary_checks():
    cfg = RunConfig(kind="hyperbolic-tiling", radius=4)
    st = _statuses(run_suite(generate(cfg.generator_spec()), cfg, 0.09))
    assert st["product_distance"] == PASS and st["metametric_sandwich"] == PASS


def test_no_frontier_skips_boundary_checks():
    cfg = RunConfig(kind="random-gnp", n=30, prob=0.1)
    st = _statuses(run_suite(generate(cfg.generator_spec()), cfg, 0.5))
    assert st["uniformity"] == SKIPPED and st["roads"] == SKIPPED
    assert st["harnack"] == PASS


def test_large_h_skips_gehring_hayman():
    cfg = RunConfig(h=0.1, radius=4)
    st = _statuses(run_suite(generate(cfg.generator_spec()), cfg, 0.5, checks=("gehring-hayman",)))
    assert st == {"gehring_hayman": SKIPPED}


def test_check_selection():
    cfg = RunConfig(radius=4, checks=("harnack",))
    assert _statuses(run_suite(generate(cfg.generator_spec()), cfg, 0.5)) == {"harnack": PASS}


def test_radius_sweep_tree():
    cfg = RunConfig(quadrature="exact-tree")
    rec = radius_sweep(cfg, (6, 8), 0.5, "quasi-isometry")
    assert rec.status == PASS
    assert set(rec.values["per_radius"]) == {6, 8}
    assert rec.values["relative_spread"] == relative_spread(rec.values["per_radius"].values())


def test_radius_sweep_threshold_and_gate():
    cfg = RunConfig(kind="hyperbolic-tiling")
    assert radius_sweep(cfg, (3, 4), 0.3, "gehring-hayman", threshold=0.0).status == FAIL
    assert radius_sweep(cfg, (4, 5), 0.3, "product-distance").status == SKIPPED
    with pytest.raises(ValueError):
        radius_sweep(cfg, (3,), 0.3, "volume")


def test_relative_spread():
    assert relative_spread([1.0, 1.2]) == pytest.approx(0.2)
    assert relative_spread([2.0]) == 0.0
    assert relative_spread([0.0, 1.0]) == math.inf


def test_record_helpers():
    rec = CheckRecord("x", status_of(False), {"v": float("inf")}, (1, 2))
    assert rec.failed and not rec.passed
    assert rec.to_dict()["values"]["v"] == "inf"
    assert CheckRecord("y", SKIPPED).passed


def test_report_files_and_determinism(tmp_path):
    cfg = RunConfig(radius=4, out=str(tmp_path))
    g = generate(cfg.generator_spec())
    rep = build_report("verify-all", cfg, g, [run_suite(g, cfg, 0.5)])
    assert rep["schema"] == "uniformize.report/1" and rep["summary"][FAIL] == 0
    paths = write_report(str(tmp_path), "verify-all", rep, {"uniformity": "a,b\n1,2\n", "empty": ""})
    names = sorted(p.split("/")[-1] for p in paths)
    assert names == ["verify_all.header.json", "verify_all.json", "verify_all_uniformity.csv"]
    body = (tmp_path / "verify_all.json").read_text()
    assert "timestamp" not in body
    assert json.loads(body)["config"]["radius"] == 4
    assert "timestamp" in json.loads((tmp_path / "verify_all.header.json").read_text())
    rep2 = build_report("verify-all", cfg, g, [run_suite(g, cfg, 0.5)])
    assert dumps(rep2) == body
