"""Annotation-based persistent homology over Z/2 for sequences of simplex
inclusions and edge contractions.

Each simplex carries a cohomology annotation: a set of live generator ids
(a sparse Z/2 vector).  Annotations are shared through a union-find forest
whose roots hold the values, so a global update ``value ^= delta`` for every
value containing a generator touches one root per distinct value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .simplextree import SimplexTree, canonical

EMPTY: frozenset = frozenset()

# Intervals shorter than this (relative to their death) are treated as
# zero-length and omitted from emitted diagrams.
ZERO_LENGTH_RTOL = 1e-12


class AnnotationForest:
    """Union-find elements grouped by annotation value, one registry per dimension."""

    def __init__(self):
        self._parent: list[int] = []
        self._value: dict[int, frozenset] = {}  # root -> value
        self._live: dict[int, int] = {}  # root -> live elements below it
        self._dim: dict[int, int] = {}  # root -> dimension
        self._registry: dict[int, dict[frozenset, int]] = {}

    def _new(self) -> int:
        e = len(self._parent)
        self._parent.append(e)
        return e

    def find(self, e: int) -> int:
        parent = self._parent
        root = e
        while parent[root] != root:
            root = parent[root]
        while parent[e] != root:
            parent[e], e = root, parent[e]
        return root

    def value(self, e: int) -> frozenset:
        return self._value[self.find(e)]

    def element(self, dim: int, value: frozenset) -> int:
        """A fresh element carrying ``value`` in dimension ``dim``."""
        e = self._new()
        reg = self._registry.setdefault(dim, {})
        root = reg.get(value)
        if root is None:
            reg[value] = e
            self._value[e] = value
            self._live[e] = 1
            self._dim[e] = dim
        else:
            self._parent[e] = root
            self._live[root] += 1
        return e

    def release(self, e: int) -> None:
        root = self.find(e)
        self._live[root] -= 1
        if self._live[root] == 0:
            dim = self._dim.pop(root)
            del self._registry[dim][self._value.pop(root)]
            del self._live[root]

    def reassign(self, e: int, value: frozenset) -> int:
        """Release ``e`` and return a new element carrying ``value``."""
        dim = self._dim[self.find(e)]
        self.release(e)
        return self.element(dim, value)

    def _merge_into(self, reg: dict, root: int, value: frozenset) -> None:
        other = reg.get(value)
        if other is None:
            reg[value] = root
            self._value[root] = value
            return
        small, big = (root, other) if self._live[root] <= self._live[other] else (other, root)
        self._parent[small] = big
        self._live[big] += self._live.pop(small)
        self._value.pop(small)
        self._dim.pop(small)
        self._value[big] = value
        reg[value] = big

    def add_where_present(self, dim: int, gen: int, delta: frozenset) -> None:
        """``value ^= delta`` for every dimension-``dim`` value containing ``gen``."""
        reg = self._registry.get(dim, {})
        hits = [(v, r) for v, r in reg.items() if gen in v]
        for v, _ in hits:
            del reg[v]
        for v, r in hits:
            self._merge_into(reg, r, v ^ delta)

    def values(self, dim: int) -> list[frozenset]:
        return list(self._registry.get(dim, {}))

    def roots(self) -> int:
        return len(self._value)


@dataclass(frozen=True)
class Event:
    kind: str  # "birth" or "death"
    dim: int
    generator: int
    scale: float


@dataclass
class _Generator:
    dim: int
    birth: float


class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` intervals, ``death`` possibly ``inf``."""

    def __init__(self, intervals: Iterable = ()):
        rows = [(int(d), float(b), float(x)) for d, b, x in intervals]
        for d, b, x in rows:
            if x < b:
                raise ValueError(f"interval ({b}, {x}) in dimension {d} dies before birth")
        rows.sort()
        self.intervals: list[tuple[int, float, float]] = rows

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other):
        return isinstance(other, PersistenceDiagram) and self.intervals == other.intervals

    def __repr__(self):
        return f"PersistenceDiagram({self.intervals!r})"

    @property
    def dims(self) -> list[int]:
        return sorted({d for d, _, _ in self.intervals})

    def in_dim(self, dim: int) -> np.ndarray:
        pts = [(b, x) for d, b, x in self.intervals if d == dim]
        return np.array(pts, dtype=float).reshape(-1, 2)

    def almost_equal(self, other: "PersistenceDiagram", tol: float = 1e-9) -> bool:
        if len(self) != len(other):
            return False
        for (d1, b1, x1), (d2, b2, x2) in zip(self.intervals, other.intervals):
            if d1 != d2 or abs(b1 - b2) > tol:
                return False
            if math.isinf(x1) or math.isinf(x2):
                if x1 != x2:
                    return False
            elif abs(x1 - x2) > tol:
                return False
        return True

    def filtered(self, dims=None, min_persistence: float = 0.0) -> "PersistenceDiagram":
        keep = []
        for d, b, x in self.intervals:
            if dims is not None and d not in dims:
                continue
            if x - b < min_persistence:
                continue
            keep.append((d, b, x))
        return PersistenceDiagram(keep)

    def truncated(self, alpha_max: float) -> "PersistenceDiagram":
        """Drop intervals born at or after ``alpha_max`` and cap deaths there."""
        return PersistenceDiagram(
            (d, b, min(x, alpha_max)) for d, b, x in self.intervals if b < alpha_max
        )

    def betti_at(self, dim: int, alpha: float) -> int:
        return sum(1 for d, b, x in self.intervals if d == dim and b <= alpha < x)

    def to_text(self) -> str:
        return "".join(f"{d},{_fmt(b)},{_fmt(x)}\n" for d, b, x in self.intervals)

    @classmethod
    def from_text(cls, text: str) -> "PersistenceDiagram":
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected dim,birth,death, got {line!r}")
            rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
        return cls(rows)

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path) -> "PersistenceDiagram":
        return cls.from_text(Path(path).read_text())


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


class PersistenceEngine:
    """Simplex tree, annotation forest and interval recorder as one mutable unit.

    Scales passed to ``add_simplex``/``contract_edge`` must be non-decreasing.
    ``on_event`` is called with the engine after every completed operation.
    """

    def __init__(self, on_event: Callable[["PersistenceEngine"], None] | None = None):
        self.tree = SimplexTree()
        self.forest = AnnotationForest()
        self.on_event = on_event
        self._gens: dict[int, _Generator] = {}
        self._next_gen = 0
        self.finished: list[tuple[int, float, float]] = []
        self.clock = -math.inf

    def _tick(self, t: float) -> float:
        t = float(t)
        if t < self.clock:
            raise ValueError(f"scale {t} precedes the current scale {self.clock}")
        self.clock = t
        return t

    def annotation(self, simplex) -> frozenset:
        node = self.tree.find(simplex)
        if node is None:
            raise KeyError(f"simplex {list(simplex)} not present")
        return self.forest.value(node.ann)

    def boundary_annotation(self, simplex) -> frozenset:
        s = canonical(simplex)
        acc = EMPTY
        if len(s) == 1:
            return acc
        for i in range(len(s)):
            node = self.tree.find(s[:i] + s[i + 1:])
            if node is None:
                raise KeyError(f"face {list(s[:i] + s[i + 1:])} of {list(s)} is missing")
            acc = acc ^ self.forest.value(node.ann)
        return acc

    def _facet_nodes(self, s: tuple[int, ...]) -> list | None:
        find = self.tree.find
        nodes = []
        for i in range(len(s)):
            node = find(s[:i] + s[i + 1:])
            if node is None:
                return None
            nodes.append(node)
        return nodes

    def _add(self, s: tuple[int, ...], t: float, facets: list | None = None) -> Event:
        p = len(s) - 1
        if p == 0:
            parent, delta = self.tree.root, EMPTY
        else:
            if facets is None:
                facets = self._facet_nodes(s)
                if facets is None:
                    raise KeyError(f"a facet of {list(s)} is missing")
            delta = EMPTY
            value = self.forest.value
            for f in facets:
                delta = delta ^ value(f.ann)
            parent = facets[-1]  # the facet dropping the last vertex
        if s[-1] in parent.children:
            raise ValueError(f"simplex {list(s)} already present")
        node = self.tree.attach(parent, s[-1])
        if not delta:
            g = self._next_gen
            self._next_gen += 1
            self._gens[g] = _Generator(p, t)
            node.ann = self.forest.element(p, frozenset((g,)))
            return Event("birth", p, g, t)
        # youngest = latest birth, later creation on ties; ids grow with creation
        u = max(delta, key=lambda g: (self._gens[g].birth, g))
        gen = self._gens.pop(u)
        self.finished.append((gen.dim, gen.birth, t))
        self.forest.add_where_present(p - 1, u, delta)
        node.ann = self.forest.element(p, EMPTY)
        return Event("death", p - 1, u, t)

    def add_simplex(self, simplex, t: float) -> Event:
        """Include one simplex whose faces are all present."""
        t = self._tick(t)
        ev = self._add(canonical(simplex), t)
        if self.on_event:
            self.on_event(self)
        return ev

    def add_closed(self, simplex, t: float) -> list[Event]:
        """Include ``simplex`` and any missing faces, lower dimensions first."""
        t = self._tick(t)
        s = canonical(simplex)
        if self.tree.find(s) is not None:
            return []
        facets = self._facet_nodes(s) if len(s) > 1 else None
        if facets is not None or len(s) == 1:
            events = [self._add(s, t, facets)]
            if self.on_event:
                self.on_event(self)
            return events
        events = []
        for k in range(1, len(s) + 1):
            for face in combinations(s, k):
                if self.tree.find(face) is None:
                    events.append(self._add(face, t))
                    if self.on_event:
                        self.on_event(self)
        return events

    def _transfer(self, a: int, b: int) -> None:
        """Move annotation weight off the simplices that are about to merge.

        For every simplex ``tau`` containing ``a`` but not ``b`` whose mirror
        (``a`` replaced by ``b``) exists, the coboundary of the cochain
        supported on ``tau`` with value ``ann(tau + b)`` is added.  Afterwards
        every simplex containing both ``a`` and ``b`` has zero annotation and
        mirror pairs agree.
        """
        tree, forest = self.tree, self.forest
        cofaces = [n for n in tree.coface_nodes((a,))]
        simp = {id(n): n.simplex() for n in cofaces}
        weight: dict[tuple[int, ...], frozenset] = {}
        for n in cofaces:
            s = simp[id(n)]
            if b in s:
                continue
            mirror = tuple(sorted(set(s) - {a} | {b}))
            if tree.find(mirror) is None:
                continue
            g = tree.find(s + (b,))
            v = forest.value(g.ann)
            if v:
                weight[s] = v
        if not weight:
            return
        updates = []
        for n in cofaces:
            s = simp[id(n)]
            if len(s) < 2:
                continue
            d = EMPTY
            for i, x in enumerate(s):
                if x != a:
                    v = weight.get(s[:i] + s[i + 1:])
                    if v:
                        d = d ^ v
            if d:
                updates.append((n, d))
        for n, d in updates:
            n.ann = forest.reassign(n.ann, forest.value(n.ann) ^ d)

    def contract_edge(self, a: int, b: int, t: float) -> list[Event]:
        """Contract ``[a, b]`` onto ``a``, repairing the link condition first."""
        t = self._tick(t)
        events = []
        for eta in self.tree.link_deficiency(a, b):
            events.append(self._add(tuple(sorted(set(eta) | {a, b})), t))
            if self.on_event:
                self.on_event(self)
        self._transfer(a, b)
        result = self.tree.structural_contract(a, b)
        for h in result.released:
            self.forest.release(h)
        if self.on_event:
            self.on_event(self)
        return events

    def betti(self, p: int) -> int:
        return sum(1 for g in self._gens.values() if g.dim == p)

    def betti_numbers(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self._gens.values():
            out[g.dim] = out.get(g.dim, 0) + 1
        return dict(sorted(out.items()))

    def live_generators(self) -> list[tuple[int, int, float]]:
        return sorted((g.dim, gid, g.birth) for gid, g in self._gens.items())

    def finalize(self, max_dim: int | None = None) -> PersistenceDiagram:
        """Finished intervals plus ``(dim, birth, inf)`` for live classes.

        Zero-length intervals are omitted.  With ``max_dim`` only dimensions
        ``0..max_dim`` are reported.  The engine is left unchanged.
        """
        rows = [
            (d, b, x) for d, b, x in self.finished
            if x - b > ZERO_LENGTH_RTOL * max(1.0, abs(x))
        ]
        rows.extend((g.dim, g.birth, math.inf) for g in self._gens.values())
        if max_dim is not None:
            rows = [r for r in rows if r[0] <= max_dim]
        return PersistenceDiagram(rows)
