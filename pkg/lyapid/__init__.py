"""
Exact tools for graphical continuous Lyapunov models on DAGs.
"""

from .graph import Digraph, Edge, parse_graph, read_graph  # noqa
from .exact import RatMatrix, det, rank, solve  # noqa
