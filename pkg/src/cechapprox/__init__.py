"""Approximate Cech persistence of Euclidean point clouds.

Exact and approximate diagrams are computed by a single annotation-based
persistence engine that supports simplex insertions and edge contractions.
"""
from .clustering import Dendrogram, complete_linkage
from .diagnostics import bottleneck, log_bottleneck, oracle_cech
from .driver import RunConfig, run_cech, run_collapse
from .geometry import cech_value, min_enclosing_ball
from .kernels import BACKEND
from .nettree import run_net_persistence
from .persistence import PersistenceDiagram, PersistenceEngine
from .simplextree import SimplexTree
from .trace import MemoryCapExceeded, Trace

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Dendrogram",
    "MemoryCapExceeded",
    "PersistenceDiagram",
    "PersistenceEngine",
    "RunConfig",
    "SimplexTree",
    "Trace",
    "bottleneck",
    "cech_value",
    "complete_linkage",
    "log_bottleneck",
    "min_enclosing_ball",
    "oracle_cech",
    "run_cech",
    "run_collapse",
    "run_net_persistence",
]
