import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from uniformize.graph import ArcPath, GraphError, WeightedMetricGraph, format_graph, parse_graph, read_graph, write_graph

from conftest import tiling, tree


def test_path_distances(path3):
    assert path3.distance(0, 2) == 2.0
    assert path3.distances_from(1).tolist() == [1.0, 0.0, 1.0]


@pytest.mark.parametrize("edges, msg", [
    ([(0, 0, 1.0)], "self-loop"),
    ([(0, 1, 0.0)], "positive"),
    ([(0, 1, -1.0)], "positive"),
    ([(0, 1, 1.0), (1, 0, 2.0)], "duplicate"),
])
def test_rejects_bad_edges(edges, msg):
    with pytest.raises(GraphError, match=msg):
        WeightedMetricGraph(2, edges)


def test_rejects_disconnected():
    with pytest.raises(GraphError, match="connected"):
        WeightedMetricGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])


def test_single_node_is_fine():
    g = WeightedMetricGraph(1, [])
    assert g.distances.shape == (1, 1) and g.distances[0, 0] == 0.0


def test_distances_match_scipy():
    rng = np.random.default_rng(3)
    for g in (tree(4), tiling(4)):
        w = rng.uniform(0.2, 3.0, size=len(g.edges))
        h = g.reweighted(w)
        rows = [u for u, _, _ in h.edges]
        cols = [v for _, v, _ in h.edges]
        M = csr_matrix((w, (rows, cols)), shape=(h.n, h.n))
        ref = shortest_path(M, directed=False)
        assert np.allclose(h.distances, ref, rtol=0, atol=1e-12)


def test_distance_table_symmetric_and_read_only():
    g = tiling(4)
    D = g.distances
    assert np.array_equal(D, D.T)
    with pytest.raises(ValueError):
        D[0, 1] = 5.0


def test_arc_path_basics(path3):
    arc = ArcPath.from_nodes(path3, [0, 1, 2])
    assert arc.length == 2.0 and arc.first == 0 and arc.last == 2
    assert arc.is_simple and arc.excess(path3) == 0.0
    assert arc.index_at(1.4) == 1 and arc.index_at(0.5) == 0  # tie goes low
    with pytest.raises(ValueError, match="adjacent"):
        ArcPath.from_nodes(path3, [0, 2])


def test_file_round_trip(tmp_path):
    g = tiling(3)
    write_graph(g, tmp_path / "g.txt")
    h = read_graph(tmp_path / "g.txt")
    assert h.edges == g.edges and h.base == g.base and h.frontier == g.frontier
    assert h.metadata == g.metadata


def test_round_trip_with_density_and_irrational_weights():
    g = tree(2).reweighted([np.pi / k for k in range(1, 7)])
    rho = np.exp(-0.3 * g.distances_from(0))
    text = format_graph(g, density=rho)
    h, dens = parse_graph(text)
    assert h.edges == g.edges
    assert np.array_equal(dens, rho)
    assert format_graph(h, density=dens) == text


@pytest.mark.parametrize("text, msg", [
    ("0 1 1.0\n", "before 'nodes'"),
    ("nodes 2 base 0\n0 1\n", "u v length"),
    ("nodes 2 base 0\n0 x 1.0\n", "cannot parse"),
    ("", "missing"),
    ("nodes 2 base 0\n0 1 1.0\ndensity\n0 1.0\n", "incomplete"),
])
def test_parse_errors(text, msg):
    with pytest.raises(GraphError, match=msg):
        parse_graph(text)
