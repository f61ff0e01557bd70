"""Exact local zeta functions of graphs over Q_p and p-adic log-Coulomb gases."""

__version__ = "0.1.0"

from .errors import (DomainError, GraphInputError, GraphZetaError, PoleError,  # noqa: E402
                     ResourceLimitError, VarianceRegionError)
from .graph import EdgeSubgraph, Graph, complete_graph, path_graph, star_graph  # noqa: E402
from .zeta import GraphZeta, evaluate, zeta  # noqa: E402

__all__ = ["DomainError", "EdgeSubgraph", "Graph", "GraphInputError", "GraphZeta", "GraphZetaError",
           "PoleError", "ResourceLimitError", "VarianceRegionError", "complete_graph", "evaluate",
           "path_graph", "star_graph", "zeta", "__version__"]
