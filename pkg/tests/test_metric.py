import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniformize.boundary import verify_rough_quasi_geodesic
from uniformize.graph import TOL, ArcPath, WeightedMetricGraph
from uniformize.metric import (
    estimate_delta,
    four_point_defect,
    gromov_product,
    gromov_products,
    h_short_arcs,
    shortest_arc,
    verify_arc_monotonicity,
    verify_tripod,
)

from conftest import brute_delta, grid, tiling, to_nx, tree
from strategies import connected_graphs


def test_path_of_three(path3):
    assert path3.distance(0, 2) == 2.0
    assert shortest_arc(path3, 0, 2).nodes == (0, 1, 2)


def test_four_cycle_has_two_geodesics(cycle4):
    assert cycle4.distance(0, 2) == 2.0
    assert shortest_arc(cycle4, 0, 2).nodes == (0, 1, 2)  # lexicographic choice
    arcs = h_short_arcs(cycle4, 0, 2, h=0.0)
    assert [a.nodes for a in arcs] == [(0, 1, 2), (0, 3, 2)]


def test_h_short_arcs_match_simple_path_enumeration():
    g = tiling(3)
    G = to_nx(g)
    rng = np.random.default_rng(0)
    for _ in range(12):
        x, y = (int(v) for v in rng.choice(g.n, 2, replace=False))
        for h in (0.0, 1.0, 2.0):
            budget = g.distance(x, y) + h + TOL
            ref = sorted(
                (sum(g.edge_length(a, b) for a, b in zip(p, p[1:])), tuple(p))
                for p in nx.all_simple_paths(G, x, y, cutoff=int(budget) + 1)
            )
            ref = [p for length, p in ref if length <= budget]
            got = [a.nodes for a in h_short_arcs(g, x, y, h, limit=1000)]
            assert got == ref


def test_h_short_arcs_rejects_negative_h(path3):
    with pytest.raises(ValueError):
        h_short_arcs(path3, 0, 2, -0.1)


def test_star_gromov_product_is_zero():
    g = WeightedMetricGraph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], base=0)
    assert gromov_product(g.distances, 1, 2, 0) == 0.0
    table = gromov_products(g, 0)
    assert table[1, 3] == 0.0 and table[1, 1] == 1.0


# -- hyperbolicity --------------------------------------------------------------

@pytest.mark.parametrize("b, R", [(2, 4), (3, 4), (2, 6)])
def test_delta_zero_on_trees(b, R):
    rep = estimate_delta(tree(R, b))
    assert rep.delta_global == 0.0 and rep.delta_base == 0.0


def test_delta_grid_matches_brute_force():
    g = grid(6)
    assert estimate_delta(g).delta_global == brute_delta(g.distances)


def test_delta_tiling_matches_brute_force():
    g = tiling(3)
    rep = estimate_delta(g)
    assert rep.delta_global == brute_delta(g.distances) > 0


def test_cycle4_delta_is_one(cycle4):
    assert estimate_delta(cycle4).delta_global == 1.0


def test_witness_reproduces_value():
    for g in (grid(5), tiling(4)):
        rep = estimate_delta(g)
        assert four_point_defect(g.distances, *rep.witness) == rep.delta_global
        assert four_point_defect(g.distances, *rep.base_witness) == rep.delta_base


def test_base_mode_bounded_by_global():
    g = tiling(4)
    base = estimate_delta(g, "base")
    assert base.delta_global is None
    assert base.delta_base <= estimate_delta(g).delta_global


def test_size_limit():
    g = grid(7)
    with pytest.raises(ValueError, match="force"):
        estimate_delta(g, size_limit=10)
    assert estimate_delta(g, size_limit=10, force=True).delta_global == estimate_delta(g).delta_global


def test_unknown_mode(path3):
    with pytest.raises(ValueError):
        estimate_delta(path3, "median")


def test_small_graphs_have_zero_delta(path3):
    assert estimate_delta(path3).delta_global == 0.0


@settings(max_examples=40, deadline=None)
@given(connected_graphs(min_n=4, max_n=8))
def test_block_decomposition_matches_brute_force(g):
    assert estimate_delta(g).delta_global == pytest.approx(brute_delta(g.distances), abs=1e-12)


# -- metric and Gromov product properties -----------------------------------------

@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_metric_axioms(g):
    D = g.distances
    assert np.all(np.diag(D) == 0)
    assert np.array_equal(D, D.T)
    off = ~np.eye(g.n, dtype=bool)
    assert np.all(D[off] > 0)
    tri = D[:, :, None] + D[None, :, :] - D[:, None, :]  # d(i,k) + d(k,j) - d(i,j) as [i,k,j]
    assert tri.min() >= -1e-9


@settings(max_examples=60, deadline=None)
@given(connected_graphs(), st.data())
def test_gromov_product_identities(g, data):
    x, y, p = (data.draw(st.integers(0, g.n - 1)) for _ in range(3))
    D = g.distances
    gp = gromov_product(D, x, y, p)
    assert gromov_product(D, y, x, p) == gp
    assert -1e-9 <= gp <= min(D[x, p], D[y, p]) + 1e-9
    assert gp + gromov_product(D, p, y, x) == pytest.approx(D[x, p], abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(integral=True), st.data())
def test_h_short_arcs_are_rough_geodesics(g, data):
    x = data.draw(st.integers(0, g.n - 1))
    y = data.draw(st.integers(0, g.n - 1))
    h = data.draw(st.sampled_from([0.0, 1.0, 2.0]))
    for arc in h_short_arcs(g, x, y, h, limit=6):
        assert arc.is_simple and arc.is_h_short(g, h)
        rec = verify_rough_quasi_geodesic(g, arc)
        assert rec.values["K_emp"] <= h + 1e-9
        assert rec.values["upper_violation"] == 0.0


# -- tripod and arc monotonicity ------------------------------------------------

def test_tripod_on_tree_is_tight():
    g = tree(4)
    rec = verify_tripod(g, 0.0, 0.0, 0, 15, 16)
    assert rec.passed and rec.values["max_equal_distance_gap"] == 0.0
    assert "vacuous" not in rec.flags


def test_tripod_on_tiling():
    g = tiling(4)
    delta = estimate_delta(g).delta_global
    for a, b1, b2 in [(0, 30, 35), (3, 22, 39), (0, 39, 22)]:
        rec = verify_tripod(g, delta, 1.0, a, b1, b2)
        assert rec.passed, rec.values


def test_tripod_vacuous_when_product_zero():
    g = WeightedMetricGraph(3, [(0, 1, 1.0), (0, 2, 1.0)])
    assert "vacuous" in verify_tripod(g, 0.0, 0.0, 0, 1, 2).flags


def test_arc_monotonicity_on_tiling():
    g = tiling(4)
    delta = estimate_delta(g).delta_global
    for x, y in itertools.combinations([5, 17, 29, 33, 39], 2):
        for arc in h_short_arcs(g, x, y, 1.0, limit=4):
            assert verify_arc_monotonicity(g, delta, 1.0, arc, 0).passed


def test_arc_monotonicity_requires_short_arc(cycle4):
    long = ArcPath.from_nodes(cycle4, [0, 1, 2, 3])
    with pytest.raises(ValueError, match="short"):
        verify_arc_monotonicity(cycle4, 1.0, 0.5, long, 0)
