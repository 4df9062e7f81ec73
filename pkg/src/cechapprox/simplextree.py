"""Simplex tree with cousin cycles.

A trie over sorted vertex labels: the path from the root to a node spells a
simplex.  Nodes with the same label at the same depth are linked into a
cyclic list, and one representative per ``(label, depth)`` is kept in a
registry, so that all cofaces of a simplex can be found by walking the
cycles of its largest label.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator


class LinkConditionError(ValueError):
    """Raised when contracting an edge that violates the link condition."""


def canonical(simplex: Iterable[int]) -> tuple[int, ...]:
    s = tuple(sorted(set(int(v) for v in simplex)))
    if not s:
        raise ValueError("empty simplex")
    if s[0] < 0:
        raise ValueError(f"vertex labels must be non-negative, got {s}")
    return s


def simplex_order(s: tuple[int, ...]):
    """Sort key: dimension first, then lexicographic."""
    return (len(s), s)


class Node:
    __slots__ = ("label", "parent", "children", "cousin", "depth", "ann")

    def __init__(self, label: int, parent: "Node | None", depth: int):
        self.label = label
        self.parent = parent
        self.children: dict[int, Node] = {}
        self.cousin: Node = self
        self.depth = depth
        self.ann = None

    def simplex(self) -> tuple[int, ...]:
        out = []
        n = self
        while n.parent is not None:
            out.append(n.label)
            n = n.parent
        return tuple(reversed(out))

    def __repr__(self):
        return f"Node({list(self.simplex())})"


@dataclass
class Contraction:
    """Outcome of the structural part of an edge contraction ``[a, b] -> [a]``.

    ``merged`` pairs each removed simplex with the already present simplex it
    is identified with (mirror simplices); ``relabeled`` pairs each simplex
    that survives under a new name with that name.  ``released`` holds the
    annotation handles of removed nodes.
    """

    keep: int
    drop: int
    merged: list = field(default_factory=list)
    relabeled: list = field(default_factory=list)
    released: list = field(default_factory=list)


class SimplexTree:
    def __init__(self, simplices: Iterable[Iterable[int]] = ()):
        self.root = Node(-1, None, 0)
        self._cousins: dict[tuple[int, int], Node] = {}
        self._count = 0
        for s in simplices:
            self.insert_closed(s)

    def __len__(self):
        return self._count

    def __contains__(self, simplex):
        return self.find(simplex) is not None

    def contains(self, simplex) -> bool:
        return self.find(simplex) is not None

    def find(self, simplex) -> Node | None:
        node = self.root
        for v in sorted(simplex):
            node = node.children.get(v)
            if node is None:
                return None
        return None if node is self.root else node

    # -- mutation -----------------------------------------------------------

    def attach(self, parent: Node, label: int) -> Node:
        """Add a child node under ``parent`` without checking the other facets."""
        if label <= parent.label:
            raise ValueError("child labels must exceed the parent label")
        node = Node(label, parent, parent.depth + 1)
        parent.children[label] = node
        key = (label, node.depth)
        rep = self._cousins.get(key)
        if rep is None:
            self._cousins[key] = node
        else:
            node.cousin = rep.cousin
            rep.cousin = node
        self._count += 1
        return node

    def insert_simplex(self, simplex) -> Node:
        """Insert one simplex whose facets are all present; return its node."""
        s = canonical(simplex)
        parent = self.find(s[:-1]) if len(s) > 1 else self.root
        if parent is None:
            raise KeyError(f"face {list(s[:-1])} of {list(s)} is missing")
        if s[-1] in parent.children:
            raise ValueError(f"simplex {list(s)} already present")
        if len(s) > 1:
            for i in range(len(s) - 1):
                if self.find(s[:i] + s[i + 1:]) is None:
                    raise KeyError(f"face {list(s[:i] + s[i + 1:])} of {list(s)} is missing")
        return self.attach(parent, s[-1])

    def insert_closed(self, simplex) -> list[tuple[int, ...]]:
        """Insert ``simplex`` with all its faces; return the faces that were new."""
        s = canonical(simplex)
        added = []
        for k in range(1, len(s) + 1):
            for face in combinations(s, k):
                parent = self.find(face[:-1]) if k > 1 else self.root
                if face[-1] not in parent.children:
                    self.attach(parent, face[-1])
                    added.append(face)
        return added

    def remove_leaf(self, node: Node) -> None:
        """Remove a node without children (a simplex with no proper coface)."""
        if node.children:
            raise ValueError(f"{node!r} still has cofaces")
        key = (node.label, node.depth)
        if node.cousin is node:
            del self._cousins[key]
        else:
            pred = node.cousin
            while pred.cousin is not node:
                pred = pred.cousin
            pred.cousin = node.cousin
            if self._cousins[key] is node:
                self._cousins[key] = node.cousin
        del node.parent.children[node.label]
        node.parent = None
        node.cousin = node
        self._count -= 1

    # -- queries ------------------------------------------------------------

    def iter_nodes(self) -> Iterator[Node]:
        stack = list(self.root.children.values())
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children.values())

    def simplices(self, dim: int | None = None) -> list[tuple[int, ...]]:
        out = [n.simplex() for n in self.iter_nodes() if dim is None or n.depth == dim + 1]
        out.sort(key=simplex_order)
        return out

    def vertices(self) -> list[int]:
        return sorted(self.root.children)

    def dimension(self) -> int:
        return max((n.depth - 1 for n in self.iter_nodes()), default=-1)

    def cousins(self, label: int, depth: int) -> Iterator[Node]:
        rep = self._cousins.get((label, depth))
        if rep is None:
            return
        n = rep
        while True:
            yield n
            n = n.cousin
            if n is rep:
                break

    def coface_nodes(self, simplex) -> list[Node]:
        """Nodes of every simplex containing ``simplex`` (itself included)."""
        s = canonical(simplex)
        top = s[-1]
        rest = set(s[:-1])
        out = []
        max_depth = max((d for (lab, d) in self._cousins if lab == top), default=0)
        for depth in range(len(s), max_depth + 1):
            for n in self.cousins(top, depth):
                if rest:
                    need = len(rest)
                    p = n.parent
                    while p is not None and need:
                        if p.label in rest:
                            need -= 1
                        p = p.parent
                    if need:
                        continue
                out.append(n)
                stack = list(n.children.values())
                while stack:
                    c = stack.pop()
                    out.append(c)
                    stack.extend(c.children.values())
        return out

    def cofaces(self, simplex) -> list[tuple[int, ...]]:
        out = [n.simplex() for n in self.coface_nodes(simplex)]
        out.sort(key=simplex_order)
        return out

    def faces(self, simplex) -> list[tuple[int, ...]]:
        """All proper non-empty faces of ``simplex``."""
        s = canonical(simplex)
        return [f for k in range(1, len(s)) for f in combinations(s, k)]

    def link(self, simplex) -> list[tuple[int, ...]]:
        s = canonical(simplex)
        if self.find(s) is None:
            raise KeyError(f"simplex {list(s)} not in complex")
        ss = set(s)
        out = [tuple(v for v in t if v not in ss) for t in self.cofaces(s) if len(t) > len(s)]
        out.sort(key=simplex_order)
        return out

    def link_deficiency(self, a: int, b: int) -> list[tuple[int, ...]]:
        """``(lk[a] & lk[b]) - lk[a, b]``, ordered dimension-then-lexicographic."""
        if a == b or self.find((a, b)) is None:
            raise KeyError(f"edge {[a, b]} not in complex")
        la = set(self.link((a,)))
        lb = set(self.link((b,)))
        lab = set(self.link((a, b)))
        out = [t for t in (la & lb) - lab]
        out.sort(key=simplex_order)
        return out

    def satisfies_link_condition(self, a: int, b: int) -> bool:
        return not self.link_deficiency(a, b)

    def structural_contract(self, a: int, b: int) -> Contraction:
        """Rewrite the tree under the edge contraction ``[a, b] -> [a]``.

        Every simplex containing ``b`` is removed; those without ``a`` either
        merge into their already present image or are re-inserted under the
        image name, carrying their annotation handle along.
        """
        if self.link_deficiency(a, b):
            raise LinkConditionError(f"edge {[a, b]} does not satisfy the link condition")
        result = Contraction(a, b)
        doomed = self.coface_nodes((b,))
        doomed.sort(key=lambda n: n.depth)
        for n in doomed:
            s = n.simplex()
            if a in s:
                continue
            image = tuple(sorted(set(s) - {b} | {a}))
            if self.find(image) is not None:
                result.merged.append((s, image))
            else:
                node = self.insert_simplex(image)
                node.ann, n.ann = n.ann, None
                result.relabeled.append((s, image))
        for n in reversed(doomed):
            if n.ann is not None:
                result.released.append(n.ann)
            self.remove_leaf(n)
        return result

    # -- debugging ----------------------------------------------------------

    def dump(self) -> str:
        return "".join(",".join(map(str, s)) + "\n" for s in self.simplices())

    def check(self) -> None:
        """Assert the structural invariants; meant for tests."""
        present = set()
        for n in self.iter_nodes():
            for c in n.children.values():
                assert c.label > n.label and c.parent is n and c.depth == n.depth + 1
            present.add(n.simplex())
        assert len(present) == self._count
        for s in present:
            for i in range(len(s)):
                if len(s) > 1:
                    assert s[:i] + s[i + 1:] in present, f"{s} missing a facet"
        by_key: dict = {}
        for n in self.iter_nodes():
            by_key.setdefault((n.label, n.depth), set()).add(id(n))
        assert set(by_key) == set(self._cousins)
        for key, ids in by_key.items():
            seen = [id(n) for n in self.cousins(*key)]
            assert len(seen) == len(set(seen)) and set(seen) == ids, f"cousin cycle {key} broken"
