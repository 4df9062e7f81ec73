"""Net-tree approximation of Cech persistence.

Level ``k`` works on a subsample ``P_k`` (``P_0`` is the whole cloud and
each level is a greedy net of the previous one, with radius
``alpha0 * eps**2 * (1 + eps)**(k - 1)``) at the single scale
``s_k = alpha0 * (1 + eps)**k``.  The complex is constant on
``[s_k, s_{k+1})``; at ``s_{k+1}`` the points dropped from the level are
contracted onto their nearest survivor and the next level's Cech complex is
filled in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .driver import DEFAULT_MAX_SIMPLICES
from .geometry import as_cloud
from .persistence import PersistenceDiagram, PersistenceEngine
from .trace import MemoryCapExceeded, Trace


def greedy_net(indices, delta: float, points) -> list[int]:
    """Scan ``indices`` ascending; keep a point iff it is farther than
    ``delta`` from every point kept so far."""
    if not delta > 0:
        raise ValueError("net radius must be positive")
    pts = np.asarray(points, dtype=float)
    kept: list[int] = []
    for i in sorted(int(i) for i in indices):
        if kept:
            d = np.sqrt(np.sum((pts[kept] - pts[i]) ** 2, axis=1))
            if np.min(d) <= delta:
                continue
        kept.append(i)
    return kept


def level_scale(alpha0: float, eps: float, k: int) -> float:
    return alpha0 * (1 + eps) ** k


def net_radius(alpha0: float, eps: float, k: int) -> float:
    """Radius of the net ``P_{k+1}`` taken inside ``P_k``."""
    return alpha0 * eps * eps * (1 + eps) ** (k - 1)


@dataclass
class NetTree:
    levels: list[list[int]]
    projections: list[dict[int, int]]  # level k: P_k -> P_{k+1}
    alpha0: float
    eps: float

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def scale(self, k: int) -> float:
        return level_scale(self.alpha0, self.eps, k)


def build_net_tree(points, alpha0: float, eps: float, alpha_max: float) -> NetTree:
    """Levels ``0..m`` with ``m`` the least integer such that ``s_m >= alpha_max``."""
    if not (alpha0 > 0 and eps > 0 and alpha_max > 0):
        raise ValueError("alpha0, eps and alpha_max must be positive")
    pts = as_cloud(points)
    m = max(0, math.ceil(math.log(alpha_max / alpha0) / math.log1p(eps) - 1e-12))
    levels = [list(range(len(pts)))]
    projections = []
    for k in range(m):
        cur = levels[-1]
        nxt = greedy_net(cur, net_radius(alpha0, eps, k), pts)
        d = cdist(pts[cur], pts[nxt])
        # argmin returns the first minimum, i.e. the smallest index on ties
        nearest = np.argmin(d, axis=1)
        projections.append({p: nxt[int(a)] for p, a in zip(cur, nearest)})
        levels.append(nxt)
    return NetTree(levels, projections, alpha0, eps)


@dataclass(frozen=True)
class InsertSimplex:
    scale: float
    simplex: tuple
    level: int


@dataclass(frozen=True)
class LevelShift:
    scale: float
    level: int  # shifting from ``level`` to ``level + 1``
    mapping: dict


def cech_complex(indices, points, alpha: float, max_dim: int) -> list[tuple[int, ...]]:
    """Simplices on ``indices`` of dimension <= ``max_dim`` with miniball radius <= ``alpha``,
    ordered dimension-then-lexicographic."""
    pts = np.asarray(points, dtype=float)
    idx = np.array(sorted(int(i) for i in indices), dtype=int)
    layer = [(int(i),) for i in idx]
    out = list(layer)
    for _ in range(max_dim):
        nxt = []
        for s in layer:
            cands = idx[np.searchsorted(idx, s[-1], side="right"):]
            if not len(cands):
                continue
            radii = kernels.coface_radii(pts[list(s)], pts[cands], alpha)
            nxt.extend(s + (int(c),) for c, r in zip(cands, radii) if r <= alpha)
        layer = nxt
        out.extend(nxt)
    return out


def iter_net_events(tree: NetTree, points, alpha_max: float, max_dim: int) -> Iterator:
    """Filtration events of the net-tree, in scale order.

    Vertices enter at 0.  Level ``k`` contributes its whole Cech complex at
    ``s_k`` (consumers skip simplices already present); a LevelShift at
    ``s_{k+1}`` precedes the next level's insertions.
    """
    pts = as_cloud(points)
    for v in tree.levels[0]:
        yield InsertSimplex(0.0, (v,), 0)
    for k, level in enumerate(tree.levels):
        s = tree.scale(k)
        if s > alpha_max:
            break
        if k > 0:
            yield LevelShift(s, k - 1, tree.projections[k - 1])
        for simplex in cech_complex(level, pts, s, max_dim):
            if len(simplex) > 1:
                yield InsertSimplex(s, simplex, k)


def net_filtration_events(tree: NetTree, points, alpha_max: float, max_dim: int) -> list:
    return list(iter_net_events(tree, points, alpha_max, max_dim))


def run_net_persistence(
    points,
    alpha0: float,
    eps: float,
    alpha_max: float,
    max_dim: int,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
    trace: Trace | None = None,
    on_event=None,
) -> PersistenceDiagram:
    """Persistence of the net-tree filtration; homology in dimensions below ``max_dim``.

    A LevelShift becomes one edge contraction per dropped point, onto its
    image, in ascending order of the dropped index.
    """
    pts = as_cloud(points)
    tree = build_net_tree(pts, alpha0, eps, alpha_max)
    engine = PersistenceEngine(on_event)
    trace = trace if trace is not None else Trace()
    for ev in iter_net_events(tree, pts, alpha_max, max_dim):
        if isinstance(ev, LevelShift):
            for p in sorted(ev.mapping):
                q = ev.mapping[p]
                if q == p:
                    continue
                if (q, p) not in engine.tree:
                    engine.add_closed((q, p), ev.scale)
                engine.contract_edge(q, p, ev.scale)
                trace.record(ev.scale, len(engine.tree), "collapse")
        elif ev.simplex not in engine.tree:
            engine.add_closed(ev.simplex, ev.scale)
            trace.record(ev.scale, len(engine.tree), "insert")
        if len(engine.tree) > max_simplices:
            raise MemoryCapExceeded(len(engine.tree), max_simplices, ev.scale, trace,
                                    engine.finalize(max_dim=max_dim - 1))
    return engine.finalize(max_dim=max_dim - 1)
