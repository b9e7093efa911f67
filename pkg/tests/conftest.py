import networkx as nx
import numpy as np
import pytest

from uniformize.generators import GeneratorSpec, generate
from uniformize.graph import WeightedMetricGraph


def tree(radius=3, branching=2, **kw):
    return generate(GeneratorSpec("regular-tree", branching=branching, radius=radius, **kw))


def tiling(rings=3, p=7, q=3, **kw):
    return generate(GeneratorSpec("hyperbolic-tiling", p=p, q=q, radius=rings, **kw))


def grid(n=6, **kw):
    return generate(GeneratorSpec("euclidean-grid", n=n, **kw))


def to_nx(g: WeightedMetricGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_weighted_edges_from(g.edges)
    return G


def brute_delta(D: np.ndarray) -> float:
    """Plain quadruple loop over all 4-subsets, no shortcuts."""
    n = D.shape[0]
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    s = sorted([D[i, j] + D[k, l], D[i, k] + D[j, l], D[i, l] + D[j, k]])
                    best = max(best, (s[2] - s[1]) / 2)
    return best


@pytest.fixture
def cycle4():
    return WeightedMetricGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)], base=0)


@pytest.fixture
def path3():
    return WeightedMetricGraph(3, [(0, 1, 1.0), (1, 2, 1.0)], base=0, frontier=[2])


#: (criterion, status, detail) lines collected by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {detail}")
