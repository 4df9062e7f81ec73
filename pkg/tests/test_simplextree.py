from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cechapprox.simplextree import LinkConditionError, SimplexTree, canonical


def closure(simplices):
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def contraction_image(simplices, a, b):
    """Image of every simplex under the vertex map sending ``b`` to ``a``."""
    return {tuple(sorted(set(s) - {b} | {a})) if b in s else s for s in simplices}


@pytest.fixture
def triangle():
    return SimplexTree([(1, 2, 3)])


@pytest.fixture
def hollow_triangle():
    return SimplexTree([(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def bowtie():
    # a complex with two filled triangles sharing vertex 5
    return SimplexTree([(1, 5), (4, 5), (2, 5), (3, 5), (1, 4), (2, 3), (1, 4, 5), (2, 3, 5), (3, 4), (1, 2)])


def test_insert_closed_returns_new_faces():
    t = SimplexTree()
    assert t.insert_closed([3, 1, 2]) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]
    assert t.insert_closed([1, 2]) == []
    assert t.insert_closed([1, 2, 4]) == [(4,), (1, 4), (2, 4), (1, 2, 4)]
    assert len(t) == 11
    t.check()


def test_insert_simplex_requires_facets():
    t = SimplexTree([(1, 2)])
    with pytest.raises(KeyError):
        t.insert_simplex((1, 2, 3))
    t.insert_closed((2, 3))
    with pytest.raises(KeyError):
        t.insert_simplex((1, 2, 3))
    t.insert_simplex((1, 3))
    t.insert_simplex((1, 2, 3))
    with pytest.raises(ValueError):
        t.insert_simplex((1, 3))
    t.check()


def test_canonical():
    assert canonical([3, 1, 3]) == (1, 3)
    with pytest.raises(ValueError):
        canonical([])
    with pytest.raises(ValueError):
        canonical([-1, 2])


def test_queries_on_triangle(triangle):
    assert triangle.cofaces([1, 2]) == [(1, 2), (1, 2, 3)]
    assert triangle.cofaces([3]) == [(3,), (1, 3), (2, 3), (1, 2, 3)]
    assert not triangle.contains([5])
    assert [5] not in triangle
    assert triangle.faces([1, 2, 3]) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert triangle.dimension() == 2
    assert triangle.vertices() == [1, 2, 3]


def test_links(triangle, hollow_triangle):
    assert triangle.link([1]) == [(2,), (3,), (2, 3)]
    assert triangle.link([1, 2]) == [(3,)]
    assert hollow_triangle.link([1, 2]) == []
    with pytest.raises(KeyError):
        triangle.link([7])


def test_link_deficiency(triangle, hollow_triangle, bowtie):
    assert triangle.link_deficiency(1, 2) == []
    assert triangle.satisfies_link_condition(1, 2)
    assert hollow_triangle.link_deficiency(1, 2) == [(3,)]
    assert bowtie.link_deficiency(1, 2) == [(5,)]
    with pytest.raises(KeyError):
        hollow_triangle.link_deficiency(1, 4)


def test_contract_closed_triangle(triangle):
    res = triangle.structural_contract(1, 2)
    assert triangle.simplices() == [(1,), (3,), (1, 3)]
    assert sorted(res.merged) == [((2,), (1,)), ((2, 3), (1, 3))]
    assert res.relabeled == []
    triangle.check()


def test_contract_path():
    t = SimplexTree([(1, 2), (2, 3)])
    res = t.structural_contract(1, 2)
    assert t.simplices() == [(1,), (3,), (1, 3)]
    assert res.relabeled == [((2, 3), (1, 3))]
    t.check()


def test_contract_isolated_edge():
    t = SimplexTree([(1, 2)])
    t.structural_contract(1, 2)
    assert t.simplices() == [(1,)]


def test_contract_refuses_link_violation(hollow_triangle):
    with pytest.raises(LinkConditionError):
        hollow_triangle.structural_contract(1, 2)


def test_contract_after_repair(bowtie):
    bowtie.insert_simplex((1, 2, 5))
    assert bowtie.satisfies_link_condition(1, 2)
    before = set(bowtie.simplices())
    bowtie.structural_contract(1, 2)
    assert set(bowtie.simplices()) == contraction_image(before, 1, 2)
    bowtie.check()


def test_remove_leaf_keeps_cousins():
    t = SimplexTree([(1, 2, 3), (2, 3, 4), (0, 3)])
    t.remove_leaf(t.find((2, 3, 4)))
    t.remove_leaf(t.find((0, 3)))
    t.check()
    with pytest.raises(ValueError):
        t.remove_leaf(t.find((1, 2)))


def test_dump_format():
    t = SimplexTree([(2, 1)])
    assert t.dump() == "1\n2\n1,2\n"


# -- random complexes ---------------------------------------------------------

complexes = st.lists(
    st.lists(st.integers(0, 7), min_size=1, max_size=4, unique=True), min_size=1, max_size=10
)


def edges_of(tree):
    return tree.simplices(1)


@settings(max_examples=100, deadline=None)
@given(complexes)
def test_cousin_cycles_and_closure(maximal):
    t = SimplexTree(maximal)
    t.check()
    assert set(t.simplices()) == closure(maximal)
    for s in closure(maximal):
        brute = sorted((c for c in closure(maximal) if set(s) <= set(c)), key=lambda c: (len(c), c))
        assert t.cofaces(s) == brute


@settings(max_examples=100, deadline=None)
@given(complexes)
def test_edge_link_inside_vertex_links(maximal):
    t = SimplexTree(maximal)
    for a, b in edges_of(t):
        lab = set(t.link((a, b)))
        assert lab <= set(t.link((a,))) & set(t.link((b,)))


@settings(max_examples=100, deadline=None)
@given(complexes, st.data())
def test_repair_removes_the_deficiency_and_its_faces(maximal, data):
    t = SimplexTree(maximal)
    edges = edges_of(t)
    if not edges:
        return
    a, b = data.draw(st.sampled_from(edges))
    before = t.link_deficiency(a, b)
    if not before:
        return
    eta = data.draw(st.sampled_from(before))
    t.insert_closed(set(eta) | {a, b})
    after = t.link_deficiency(a, b)
    # the closed insertion also adds every face of eta joined with [a, b]
    assert eta not in after
    assert set(after) == {f for f in before if not set(f) <= set(eta)}


@settings(max_examples=150, deadline=None)
@given(complexes, st.data())
def test_contraction_matches_vertex_map_image(maximal, data):
    t = SimplexTree(maximal)
    edges = edges_of(t)
    if not edges:
        return
    a, b = data.draw(st.sampled_from(edges))
    if data.draw(st.booleans()):
        a, b = b, a
    for eta in t.link_deficiency(a, b):
        t.insert_closed(set(eta) | {a, b})
    before = set(t.simplices())
    both = sum(1 for s in before if a in s and b in s)
    res = t.structural_contract(a, b)
    assert set(t.simplices()) == contraction_image(before, a, b)
    assert b not in t.vertices()
    # every dropped simplex without ``a`` is reported once, merged or relabeled
    reported = [s for s, _ in res.merged] + [s for s, _ in res.relabeled]
    assert sorted(reported) == sorted(s for s in before if b in s and a not in s)
    # under the link condition the mirror pairs correspond to simplices containing the edge
    assert len(res.merged) == both
    assert len(before) - len(t) == 2 * both
    t.check()


def test_one_repair_can_clear_nested_deficiencies():
    t = SimplexTree([[0, 1, 2], [0, 2, 3], [1, 2, 3]])
    assert t.link_deficiency(0, 1) == [(3,), (2, 3)]
    t.insert_closed((0, 1, 2, 3))
    assert t.link_deficiency(0, 1) == []
