"""Cech persistence with cluster-driven collapses.

Simplices are expanded from a priority queue keyed by miniball radius, as
in a plain Cech filtration.  Every time ``batch`` new simplices have entered
the complex, the complete-linkage dendrogram is scanned up to ``epsilon``
times the current scale and each merge found is performed as an edge
contraction, after which expansion restarts from the surviving vertices.
With ``epsilon = 0`` no merge ever fires and the result is exact Cech
persistence.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .clustering import ClusterState, Dendrogram, complete_linkage
from .geometry import as_cloud
from .persistence import PersistenceDiagram, PersistenceEngine
from .trace import MemoryCapExceeded, Trace

DEFAULT_MAX_SIMPLICES = 5_000_000


@dataclass
class RunConfig:
    epsilon: float = 0.0
    alpha_max: float = 1.0
    max_dim: int = 2  # largest simplex dimension; homology is reported below it
    batch: int = 1
    seed: int = 0
    max_simplices: int = DEFAULT_MAX_SIMPLICES

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if not self.alpha_max > 0:
            raise ValueError("alpha_max must be > 0")
        if self.max_dim < 1:
            raise ValueError("max_dim must be >= 1")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if self.max_simplices < 1:
            raise ValueError("max_simplices must be >= 1")


@dataclass
class DriverState:
    points: np.ndarray
    clusters: ClusterState
    engine: PersistenceEngine
    trace: Trace = field(default_factory=Trace)
    queue: list = field(default_factory=list)
    frontier: float = 0.0  # dendrogram scanned up to here
    level: int = 0
    next_event: int = 0
    added_since_scan: int = 0
    coords: np.ndarray | None = None  # row i: representative of cluster i
    labels: np.ndarray | None = None  # sorted live cluster indices

    def __post_init__(self):
        if self.coords is None:
            self.coords = self.points.copy()
        if self.labels is None:
            self.labels = np.array(sorted(self.clusters.live), dtype=int)

    def reseed(self) -> None:
        self.queue = [(0.0, 0, (int(i),)) for i in self.labels]
        heapq.heapify(self.queue)


def _check_cap(state: DriverState, cfg: RunConfig, scale: float) -> None:
    n = len(state.engine.tree)
    if n > cfg.max_simplices:
        diagram = state.engine.finalize(max_dim=cfg.max_dim - 1)
        raise MemoryCapExceeded(n, cfg.max_simplices, scale, state.trace, diagram)


def collapse_step(state: DriverState, alpha: float, cfg: RunConfig, dendrogram: Dendrogram) -> bool:
    """Contract every pending linkage event below ``epsilon * alpha``.

    Returns whether anything was contracted; if so the queue is reseeded
    with the surviving vertices and the level advances.
    """
    limit = cfg.epsilon * alpha
    events = dendrogram.events
    engine = state.engine
    applied = False
    while state.next_event < len(events) and events[state.next_event].scale < limit:
        ev = events[state.next_event]
        state.next_event += 1
        merge = state.clusters.advance(ev)
        t = max(alpha, engine.clock)
        if (merge.keep, merge.drop) not in engine.tree:
            engine.add_closed((merge.keep, merge.drop), t)
        engine.contract_edge(merge.keep, merge.drop, t)
        state.coords[merge.keep] = state.points[merge.representative]
        state.trace.record(t, len(engine.tree), "collapse")
        applied = True
        _check_cap(state, cfg, t)
    if not applied:
        return False
    state.labels = np.array(sorted(state.clusters.live), dtype=int)
    state.reseed()
    state.level += 1
    state.frontier = limit
    return True


def run_collapse(
    points,
    cfg: RunConfig,
    dendrogram: Dendrogram | None = None,
    on_event: Callable[[PersistenceEngine], None] | None = None,
) -> tuple[PersistenceDiagram, Trace]:
    pts = as_cloud(points)
    if dendrogram is None:
        dendrogram = complete_linkage(pts) if cfg.epsilon > 0 else Dendrogram([], 1)
    elif dendrogram.n_points != len(pts):
        raise ValueError(
            f"dendrogram is for {dendrogram.n_points} points but the cloud has {len(pts)}"
        )
    state = DriverState(pts, ClusterState.singletons(pts), PersistenceEngine(on_event))
    state.reseed()
    engine = state.engine
    tree = engine.tree
    D = cfg.max_dim
    while state.queue:
        alpha, dim, sigma = heapq.heappop(state.queue)
        if alpha > cfg.alpha_max:
            break
        if sigma not in tree:
            t = max(alpha, engine.clock)
            state.added_since_scan += len(engine.add_closed(sigma, t))
            state.trace.record(t, len(tree), "insert")
            _check_cap(state, cfg, t)
        if dim < D:
            labels = state.labels
            cands = labels[np.searchsorted(labels, sigma[-1], side="right"):]
            if len(cands):
                radii = kernels.coface_radii(state.coords[list(sigma)], state.coords[cands], cfg.alpha_max)
                for c, r in zip(cands.tolist(), radii.tolist()):
                    if r <= cfg.alpha_max:
                        heapq.heappush(state.queue, (r, dim + 1, sigma + (c,)))
        if state.added_since_scan >= cfg.batch:
            state.added_since_scan = 0
            collapse_step(state, alpha, cfg, dendrogram)
    return engine.finalize(max_dim=D - 1), state.trace


def run_cech(points, alpha_max: float, max_dim: int, **kw) -> tuple[PersistenceDiagram, Trace]:
    """Exact Cech persistence: the collapse driver with ``epsilon = 0``."""
    return run_collapse(points, RunConfig(epsilon=0.0, alpha_max=alpha_max, max_dim=max_dim, **kw))
