"""Distributed subgraph-freeness testers in a simulated CONGEST network."""
from .graph import DiGraph, Graph, GraphError, Pattern, SizeLimitError
from .kernels import BACKEND

__all__ = ["BACKEND", "DiGraph", "Graph", "GraphError", "Pattern", "SizeLimitError"]
__version__ = "0.1.0"
