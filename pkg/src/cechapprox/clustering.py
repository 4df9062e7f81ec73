"""Complete-linkage hierarchical clustering and the cluster bookkeeping that
turns dendrogram merges into vertex contractions."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .geometry import as_cloud


class LinkageEvent(NamedTuple):
    scale: float
    i: int
    j: int


@dataclass
class Dendrogram:
    events: list[LinkageEvent]
    n_points: int

    def __post_init__(self):
        if len(self.events) != max(self.n_points - 1, 0):
            raise ValueError(
                f"{self.n_points} points need {self.n_points - 1} merges, got {len(self.events)}"
            )
        prev = -np.inf
        for ev in self.events:
            if not 0 <= ev.i < ev.j < self.n_points:
                raise ValueError(f"bad cluster pair in {ev}")
            if ev.scale < prev:
                raise ValueError("linkage scales must be non-decreasing")
            prev = ev.scale

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def to_text(self) -> str:
        return "".join(f"{e.scale!r},{e.i},{e.j}\n" for e in self.events)

    @classmethod
    def from_text(cls, text: str, n_points: int | None = None) -> "Dendrogram":
        events = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected scale,i,j, got {line!r}")
            events.append(LinkageEvent(float(parts[0]), int(parts[1]), int(parts[2])))
        if n_points is None:
            n_points = len(events) + 1
        return cls(events, n_points)

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path, n_points: int | None = None) -> "Dendrogram":
        return cls.from_text(Path(path).read_text(), n_points)


def complete_linkage(points) -> Dendrogram:
    """Agglomerative clustering with the maximum-distance linkage.

    Each merge joins the pair of live clusters at the smallest linkage
    distance, ties going to the lexicographically smallest ``(i, j)``.  The
    merged cluster keeps the smaller index, so a cluster's index is always
    its smallest member.
    """
    pts = as_cloud(points)
    n = len(pts)
    d = cdist(pts, pts)
    np.fill_diagonal(d, np.inf)
    alive = np.ones(n, dtype=bool)
    # per row k: smallest linkage to a live cluster with larger index
    row_arg = np.zeros(n, dtype=int)
    row_min = np.full(n, np.inf)

    def refresh(k):
        if k >= n - 1:
            row_min[k] = np.inf
            return
        a = int(np.argmin(d[k, k + 1:]))
        row_arg[k] = k + 1 + a
        row_min[k] = d[k, k + 1 + a]

    for k in range(n):
        refresh(k)
    events = []
    for _ in range(n - 1):
        i = int(np.argmin(row_min))
        j = int(row_arg[i])
        events.append(LinkageEvent(float(row_min[i]), i, j))
        merged = np.maximum(d[i], d[j])
        merged[i] = merged[j] = np.inf
        d[i, :] = merged
        d[:, i] = merged
        d[j, :] = np.inf
        d[:, j] = np.inf
        alive[j] = False
        row_min[j] = np.inf
        refresh(i)
        # only entries in columns i and j changed, and only upwards
        for k in np.flatnonzero(alive & ((row_arg == i) | (row_arg == j))):
            refresh(int(k))
    return Dendrogram(events, n)


@dataclass
class Cluster:
    representative: int
    members: list[int]


class Merge(NamedTuple):
    keep: int  # surviving cluster index
    drop: int  # retired cluster index
    keep_point: int  # old representative of ``keep``
    drop_point: int  # old representative of ``drop``
    representative: int  # new representative of ``keep``


@dataclass
class ClusterState:
    """Live clusters indexed by their smallest member; starts as singletons."""

    points: np.ndarray
    live: dict[int, Cluster] = field(default_factory=dict)
    level: int = 0

    @classmethod
    def singletons(cls, points) -> "ClusterState":
        pts = as_cloud(points)
        return cls(pts, {i: Cluster(i, [i]) for i in range(len(pts))})

    def representative(self, i: int) -> int:
        return self.live[i].representative

    def advance(self, event: LinkageEvent) -> Merge:
        """Apply one linkage event in place."""
        _, i, j = event
        if i not in self.live or j not in self.live:
            raise KeyError(f"linkage event {tuple(event)} refers to a retired cluster")
        ci = self.live[i]
        cj = self.live.pop(j)
        members = sorted(ci.members + cj.members)
        coords = self.points[members]
        dist = np.linalg.norm(coords - coords.mean(axis=0), axis=1)
        rep = members[int(np.argmin(dist))]
        merge = Merge(i, j, ci.representative, cj.representative, rep)
        self.live[i] = Cluster(rep, members)
        return merge
