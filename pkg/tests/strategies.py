"""Hypothesis strategies for small connected weighted graphs."""
from hypothesis import strategies as st

from uniformize.graph import WeightedMetricGraph


@st.composite
def connected_graphs(draw, min_n=2, max_n=9, integral=False, frontier=False):
    n = draw(st.integers(min_n, max_n))
    weight = st.integers(1, 4).map(float) if integral else st.floats(0.1, 5.0, allow_nan=False)
    edges = {}
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges[(u, v)] = draw(weight)
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    for a, b in extra:
        if a != b:
            edges.setdefault((min(a, b), max(a, b)), draw(weight))
    g = WeightedMetricGraph(n, [(u, v, w) for (u, v), w in edges.items()], base=0)
    if frontier:
        d = g.distances_from(0)
        far = max(d)
        g = WeightedMetricGraph(n, g.edges, 0, [v for v in range(n) if d[v] == far])
    return g
