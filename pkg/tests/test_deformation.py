import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from uniformize.deformation import (
    DeformationParams,
    boundary_distance,
    check_boundary_lower_bound,
    check_diameter,
    check_harnack,
    check_incompleteness_cauchy,
    check_local_bilipschitz,
    deform,
    edge_integral,
    trapezoid_factor,
)
from uniformize.graph import WeightedMetricGraph
from uniformize.records import PASS, SKIPPED

from conftest import grid, tiling, tree


def test_trapezoid_edge_weight():
    g = WeightedMetricGraph(3, [(0, 1, 1.0), (1, 2, 1.0)], base=0)
    ds = deform(g, 1.0)
    assert ds.weights[1] == pytest.approx((math.exp(-1) + math.exp(-2)) / 2, rel=1e-15)
    assert ds.distances[0, 2] == pytest.approx((1 + 2 * math.exp(-1) + math.exp(-2)) / 2, rel=1e-15)


@settings(max_examples=80, deadline=None)
@given(st.floats(0, 6), st.floats(0.05, 4), st.floats(-1, 1), st.floats(0.05, 2))
def test_edge_integral_matches_quadrature(a, length, shift, eps):
    b = a + shift * length  # keeps |a - b| <= length
    if b < 0:
        b = 0.0
        a = min(a, length)
    kink = [t for t in [(b + length - a) / 2] if 0 < t < length]
    ref, _ = quad(lambda t: math.exp(-eps * min(a + t, b + length - t)), 0, length,
                  points=kink or None, epsabs=1e-13, epsrel=1e-12)
    assert edge_integral(a, b, length, eps) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_exact_tree_radial_distance_closed_form():
    g = tree(6)
    eps = 0.5
    ds = deform(g, DeformationParams(eps, quadrature="exact"))
    d = g.distances_from(0)
    assert np.allclose(ds.distances[0], (1 - np.exp(-eps * d)) / eps, rtol=1e-13, atol=0)


@pytest.mark.parametrize("eps", [0.3, 1.0])
def test_exact_mode_subdivision_invariant(eps):
    base = deform(tree(4), DeformationParams(eps, quadrature="exact-tree")).distances
    for k in (2, 4):
        ds = deform(tree(4, subdivision=k), DeformationParams(eps, quadrature="exact-tree"))
        n0 = base.shape[0]
        assert np.allclose(ds.distances[:n0, :n0], base, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("eps", [0.5, 1.0])
def test_trapezoid_converges_at_second_order(eps):
    exact = deform(tree(4), DeformationParams(eps, quadrature="exact-tree")).distances
    n0 = exact.shape[0]
    errors = []
    for k in (1, 2, 4, 8):
        D = deform(tree(4, subdivision=k), eps).distances[:n0, :n0]
        diff = D - exact
        assert diff.min() >= -1e-12  # convexity: trapezoid overshoots
        assert np.all(diff <= exact * (eps / k) ** 2 / 12 + 1e-12)
        errors.append(diff.max())
    for coarse, fine in zip(errors, errors[1:]):
        assert fine <= coarse / 2


def test_trapezoid_factor():
    assert trapezoid_factor(0.0) == 1.0
    x = 0.7
    assert trapezoid_factor(x) == pytest.approx((x / 2) / math.tanh(x / 2))
    assert trapezoid_factor(1e-8) == pytest.approx(1.0)


@pytest.mark.parametrize("quadrature", ["trapezoid", "exact-tree"])
def test_scale_consistency(quadrature):
    """Scaling lengths by c and eps by 1/c scales d_eps by c."""
    c, eps = 2.5, 0.4
    a = deform(tiling(3), DeformationParams(eps, quadrature=quadrature)).distances
    b = deform(tiling(3, edge_length=c), DeformationParams(eps / c, quadrature=quadrature)).distances
    assert np.allclose(b, c * a, rtol=1e-12, atol=0)


def test_params_validation():
    with pytest.raises(ValueError):
        DeformationParams(0.0)
    with pytest.raises(ValueError):
        DeformationParams(0.5, h=-1)
    with pytest.raises(ValueError):
        DeformationParams(0.5, quadrature="simpson")
    assert DeformationParams(0.5, quadrature="exact").quadrature == "exact-tree"


# -- checks ------------------------------------------------------------------------

def test_harnack_long_path():
    g = WeightedMetricGraph(61, [(i, i + 1, 1.0) for i in range(60)], base=0)
    for eps in (0.1, 1.0):
        rec = check_harnack(deform(g, eps))
        assert rec.status == PASS
        assert rec.values["min_relative_slack"] >= -1e-9


def test_harnack_detects_bad_density():
    ds = deform(tree(3), 0.5)
    ds.density = ds.density.copy()
    ds.density[1] *= 2.0
    assert check_harnack(ds).failed


def test_diameter_tree():
    rec = check_diameter(deform(tree(8), 0.5))
    assert rec.values["bound"] == pytest.approx(6.5949, abs=5e-5)
    assert rec.values["diameter"] < rec.values["bound"]
    assert rec.status == PASS


def test_diameter_single_edge():
    g = WeightedMetricGraph(2, [(0, 1, 1.0)])
    ds = deform(g, 1.0)
    rec = check_diameter(ds)
    assert rec.values["diameter"] == ds.weights[0] and rec.status == PASS


def test_bilipschitz_on_subdivided_tree():
    g = tree(3, subdivision=4)
    ds = deform(g, 0.5)
    for w in (0, 5, g.n - 1):
        rec = check_local_bilipschitz(ds, w)
        assert rec.status == PASS and "vacuous" not in rec.flags


def test_bilipschitz_on_grid_center():
    g = grid(8)
    rec = check_local_bilipschitz(deform(g, 0.2), g.base)
    assert rec.status == PASS
    assert rec.values["ball_size"] == 5


def test_bilipschitz_singleton_ball_is_vacuous():
    g = WeightedMetricGraph(3, [(0, 1, 2.0), (1, 2, 2.0)])
    rec = check_local_bilipschitz(deform(g, 0.5), 1)
    assert rec.passed and rec.flags == ["vacuous"]


def test_boundary_distance_bracket():
    ds = deform(tree(6), 0.5)
    lo, hi = boundary_distance(ds, 0)
    assert lo == ds.distances[0, ds.graph.frontier].min()
    assert hi - lo == pytest.approx(math.exp(-0.5 * 6) / 0.5)


def test_boundary_distance_needs_frontier(cycle4):
    with pytest.raises(ValueError, match="no boundary proxy"):
        boundary_distance(deform(cycle4, 0.5), 0)
    assert check_boundary_lower_bound(deform(cycle4, 0.5)).status == SKIPPED


@pytest.mark.parametrize("eps", [0.3, 0.5, 1.0])
def test_boundary_lower_bound_tree(eps):
    rec = check_boundary_lower_bound(deform(tree(8), eps))
    assert rec.status == PASS
    assert rec.values["judged"] == rec.values["inner_nodes"] == 31


def test_boundary_lower_bound_skips_when_frontier_too_close():
    rec = check_boundary_lower_bound(deform(tree(2), 0.1))
    assert rec.status == SKIPPED and rec.flags == ["frontier too close"]


@pytest.mark.parametrize("quadrature", ["trapezoid", "exact-tree"])
@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0])
def test_cauchy_along_tree_ray(quadrature, eps):
    g = tree(8)
    ray = [0]
    while len(ray) <= 8:
        ray.append(2 * ray[-1] + 1)
    rec = check_incompleteness_cauchy(deform(g, DeformationParams(eps, quadrature=quadrature)), ray)
    assert rec.status == PASS
    assert rec.values["K"] == 0.0
    assert (rec.values["quadrature_factor"] == 1.0) == (quadrature == "exact-tree")


def test_cauchy_ray_validation(path3):
    ds = deform(path3, 0.5)
    with pytest.raises(ValueError, match="at least 3"):
        check_incompleteness_cauchy(ds, [0, 1])
    with pytest.raises(ValueError, match="base point"):
        check_incompleteness_cauchy(ds, [1, 2, 1])
    with pytest.raises(ValueError, match="away"):
        check_incompleteness_cauchy(ds, [0, 1, 0])


def test_epsilon_policy():
    ds = deform(tiling(4), 0.09)
    pol = ds.epsilon_policy()
    assert pol["delta"] == 2.0 and pol["satisfied"]
    assert not deform(tiling(4), 0.1).epsilon_policy()["satisfied"]
    assert deform(tree(3), 0.9).epsilon_policy()["epsilon_bound"] == 1.0


def test_supplied_delta_skips_scan():
    ds = deform(tiling(3), 0.2, delta=7.0)
    assert ds.delta == 7.0
