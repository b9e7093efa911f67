import math

import numpy as np
import pytest

from uniformize.deformation import DeformationParams, deform
from uniformize.records import INFO, PASS
from uniformize.uniformity import pair_ratios, sample_pairs, verify_gehring_hayman, verify_uniform

from conftest import grid, tiling, tree


def test_four_cycle_gehring_hayman_ratio(cycle4):
    """Arc 1-0-3 passes the heavy base point, 1-2-3 does not: K = e^eps."""
    for eps in (0.3, 1.0):
        rec = verify_gehring_hayman(deform(cycle4, eps), [(1, 3)])
        assert rec.values["K_emp"] == pytest.approx(math.exp(eps), rel=1e-14)
        assert rec.values["K_emp"] > 1 and rec.witness == (1, 3)


def test_tree_exact_constants():
    g = tree(8)
    ds = deform(g, DeformationParams(0.5, quadrature="exact-tree"))
    pairs = sample_pairs(g, "inner")
    rep = verify_uniform(ds, pairs, h=0.0)
    assert rep.A_quasiconvex == 1.0
    assert rep.A_cone <= math.e
    assert rep.record().status == PASS
    gh = verify_gehring_hayman(ds, sample_pairs(g, "all"), h=0.0)
    assert gh.values["K_emp"] == 1.0


def test_tree_bound_with_default_h():
    g = tree(8)
    rep = verify_uniform(deform(g, 0.5), sample_pairs(g, "inner"))
    assert rep.bound == pytest.approx(math.exp(9 * 0.5 / 14 + 1))
    assert rep.A_cone <= rep.bound


def test_inner_region_is_half_radius():
    g = tree(8)
    pairs = sample_pairs(g, "inner")
    nodes = {v for p in pairs for v in p}
    assert nodes == {v for v in range(g.n) if g.distance(0, v) <= 4}
    assert len(pairs) == 31 * 30 // 2


def test_grid_is_informational():
    g = grid(8)
    rep = verify_uniform(deform(g, 0.5), sample_pairs(g, "inner"), informational=True)
    rec = rep.record()
    assert rec.status == INFO and rec.values["pairs"] > 0


def test_degenerate_and_empty_pairs(path3):
    ds = deform(path3, 0.5)
    rep = verify_uniform(ds, [(0, 0), (0, 2)])
    assert rep.degenerate == 1 and len(rep.rows) == 1
    with pytest.raises(ValueError, match="empty"):
        verify_uniform(ds, [])
    with pytest.raises(ValueError, match="degenerate"):
        verify_uniform(ds, [(1, 1)])


def test_empty_frontier_rejected(cycle4):
    with pytest.raises(ValueError, match="no boundary proxy"):
        verify_uniform(deform(cycle4, 0.5), [(0, 2)])


def test_witnesses_reproduce():
    g = tiling(5)
    ds = deform(g, 0.3)
    rep = verify_uniform(ds, sample_pairs(g, "inner"))
    x, y = rep.witness_quasiconvex
    assert pair_ratios(ds, x, y)["quasiconvex"] == rep.A_quasiconvex
    x, y, z = rep.witness_cone
    again = pair_ratios(ds, x, y)
    assert again["cone"] == rep.A_cone and again["cone_z"] == z
    assert max(rep.A_cone_first_half, rep.A_cone_second_half) == rep.A_cone


def test_ratios_are_sane_on_tiling():
    g = tiling(4)
    ds = deform(g, 0.3)
    rep = verify_uniform(ds, sample_pairs(g, "all"))
    for r in rep.rows:
        assert r["quasiconvex"] >= 1 - 1e-9
        assert r["cone"] >= 0


def test_gh_rejects_large_h(path3):
    with pytest.raises(ValueError, match="1/13"):
        verify_gehring_hayman(deform(path3, 0.5), [(0, 2)], h=1 / 13)


def test_A_nonincreasing_as_eps_decreases():
    g = tree(6)
    pairs = sample_pairs(g, "inner")
    values = [verify_uniform(deform(g, DeformationParams(e, quadrature="exact-tree")), pairs, h=0.0)
              for e in (1.0, 0.5, 0.3, 0.1)]
    A = [r.A for r in values]
    cone = [r.A_cone for r in values]
    assert all(b <= a + 1e-12 for a, b in zip(A, A[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(cone, cone[1:]))


def test_sampling_large_graphs():
    g = tree(8)
    a = sample_pairs(g, "all", seed=3, sample_size=300)
    b = sample_pairs(g, "all", seed=3, sample_size=300)
    c = sample_pairs(g, "all", seed=4, sample_size=300)
    assert a == b and a != c
    assert all(x < y for x, y in a)
    assert {(0, f) for f in g.frontier} <= set(a)
    assert len(a) >= 300


def test_sampling_small_graphs_use_all_pairs():
    g = tiling(3)
    assert len(sample_pairs(g, "all")) == g.n * (g.n - 1) // 2
    with pytest.raises(ValueError):
        sample_pairs(g, "outer")


def test_csv_export():
    g = tree(3)
    rep = verify_uniform(deform(g, 0.5), sample_pairs(g, "inner"))
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("x,y,d,d_eps")
    assert len(lines) == len(rep.rows) + 1
