"""Conformal uniformization of finite approximations of Gromov hyperbolic graphs."""
from .config import RunConfig
from .deformation import DeformationParams, DeformedSpace, deform
from .generators import GeneratorSpec, generate
from .graph import ArcPath, GraphError, WeightedMetricGraph, read_graph, write_graph
from .kernels import BACKEND
from .metric import estimate_delta, gromov_product, h_short_arcs, shortest_arc
from .records import CheckRecord

__version__ = "0.1.0"

__all__ = [
    "ArcPath", "BACKEND", "CheckRecord", "DeformationParams", "DeformedSpace", "GeneratorSpec",
    "GraphError", "RunConfig", "WeightedMetricGraph", "deform", "estimate_delta", "generate",
    "gromov_product", "h_short_arcs", "read_graph", "shortest_arc", "write_graph",
]
