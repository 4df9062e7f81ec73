import math

import numpy as np
import pytest

from cechapprox.diagnostics import enumerate_cech, oracle_cech
from cechapprox.geometry import gen_circle_wedge
from cechapprox.nettree import (
    InsertSimplex,
    LevelShift,
    build_net_tree,
    cech_complex,
    greedy_net,
    level_scale,
    net_filtration_events,
    net_radius,
    run_net_persistence,
)
from cechapprox.persistence import PersistenceDiagram
from cechapprox.trace import MemoryCapExceeded, Trace


def line(*xs):
    return np.array(xs, dtype=float).reshape(-1, 1)


def assert_is_net(sub, full, delta, pts):
    for i, p in enumerate(sub):
        for q in sub[i + 1:]:
            assert np.linalg.norm(pts[p] - pts[q]) > delta
    for p in full:
        assert min(np.linalg.norm(pts[p] - pts[q]) for q in sub) <= delta


def test_greedy_net_examples():
    pts = line(0, 1, 2, 3, 4)
    assert greedy_net(range(5), 1.5, pts) == [0, 2, 4]
    assert greedy_net(range(5), 0.5, pts) == [0, 1, 2, 3, 4]
    assert greedy_net(range(3), 0.5, line(0, 0.1, 4)) == [0, 2]
    with pytest.raises(ValueError):
        greedy_net(range(3), 0.0, pts)


def test_greedy_net_conditions_on_random_clouds():
    rng = np.random.default_rng(0)
    for _ in range(20):
        pts = rng.normal(size=(40, 2))
        delta = float(rng.uniform(0.1, 1.5))
        net = greedy_net(range(40), delta, pts)
        assert_is_net(net, range(40), delta, pts)


def test_radius_and_scale_formulas():
    assert level_scale(0.1, 0.5, 3) == pytest.approx(0.1 * 1.5**3)
    assert net_radius(1.0, 1.0, 0) == pytest.approx(0.5)
    assert net_radius(0.2, 0.5, 2) == pytest.approx(0.2 * 0.25 * 1.5)


def test_build_small_tree():
    pts = line(0, 0.1, 4)
    tree = build_net_tree(pts, alpha0=1.0, eps=1.0, alpha_max=2.0)
    assert tree.depth == 1
    assert tree.levels == [[0, 1, 2], [0, 2]]
    assert tree.projections[0] == {0: 0, 1: 0, 2: 2}


def test_identity_levels_when_radii_are_small():
    pts = line(0, 1, 2.5)
    tree = build_net_tree(pts, alpha0=0.01, eps=0.1, alpha_max=1.0)
    # the largest net radius stays below the smallest distance
    assert net_radius(0.01, 0.1, tree.depth - 1) < 1
    assert all(level == [0, 1, 2] for level in tree.levels)
    assert all(all(k == v for k, v in proj.items()) for proj in tree.projections)


def test_levels_nest_and_project_to_nearest():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(60, 2))
    tree = build_net_tree(pts, alpha0=0.05, eps=0.5, alpha_max=3.0)
    assert tree.scale(tree.depth) >= 3.0 > tree.scale(tree.depth - 1)
    for k, proj in enumerate(tree.projections):
        cur, nxt = tree.levels[k], tree.levels[k + 1]
        assert set(nxt) <= set(cur)
        assert_is_net(nxt, cur, net_radius(0.05, 0.5, k), pts)
        for p, q in proj.items():
            d = np.linalg.norm(pts[nxt] - pts[p], axis=1)
            assert q == nxt[int(np.flatnonzero(d == d.min())[0])]


def test_coarse_level_covers_thickened_fine_level():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(80, 2))
    a0, eps = 0.05, 0.4
    tree = build_net_tree(pts, a0, eps, alpha_max=2.0)
    for k in range(tree.depth):
        s, s_next = level_scale(a0, eps, k), level_scale(a0, eps, k + 1)
        base = pts[rng.integers(0, 80, 1000)]
        u = rng.normal(size=(1000, 2))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        x = base + u * (s * rng.uniform(0, 1, 1000))[:, None]
        coarse = pts[tree.levels[k + 1]]
        near = np.min(np.linalg.norm(x[:, None] - coarse[None], axis=2), axis=1)
        assert np.all(near <= s_next + 1e-9)


def test_cech_complex_matches_enumeration():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(9, 2))
    got = cech_complex(range(9), pts, 0.8, 2)
    assert set(got) == set(enumerate_cech(pts, 0.8, 2))
    assert got == sorted(got, key=lambda s: (len(s), s))


def test_events_single_point():
    pts = line(0)
    tree = build_net_tree(pts, 0.1, 0.5, 1.0)
    events = net_filtration_events(tree, pts, 1.0, 2)
    assert events[0] == InsertSimplex(0.0, (0,), 0)
    assert all(isinstance(e, LevelShift) and e.mapping == {0: 0} for e in events[1:])


def test_events_two_points_edge_enters_at_first_level_past_one():
    pts = line(0, 2)
    tree = build_net_tree(pts, 0.1, 0.5, 3.0)
    events = net_filtration_events(tree, pts, 3.0, 2)
    edge = [e for e in events if isinstance(e, InsertSimplex) and e.simplex == (0, 1)]
    k = math.ceil(math.log(1 / 0.1) / math.log(1.5))
    assert edge[0].scale == pytest.approx(0.1 * 1.5**k)
    assert edge[0].scale >= 1.0 > edge[0].scale / 1.5
    scales = [e.scale for e in events]
    assert scales == sorted(scales)


def test_dropped_vertices_never_reappear():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(30, 2))
    tree = build_net_tree(pts, 0.05, 0.6, 2.0)
    dropped = set()
    for ev in net_filtration_events(tree, pts, 2.0, 2):
        if isinstance(ev, LevelShift):
            dropped |= {p for p, q in ev.mapping.items() if p != q}
        elif ev.scale > 0:
            assert not dropped & set(ev.simplex)


def snap(x, a0, eps):
    if x == 0 or math.isinf(x):
        return x
    k = math.ceil(math.log(x / a0) / math.log1p(eps) - 1e-12)
    return level_scale(a0, eps, k)


def test_identity_levels_reproduce_snapped_oracle():
    pts = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 1.8)])
    a0, eps, amax = 0.01, 0.05, 1.0
    tree = build_net_tree(pts, a0, eps, amax)
    assert all(level == list(range(5)) for level in tree.levels)
    got = run_net_persistence(pts, a0, eps, amax, 2)
    oracle = oracle_cech(pts, amax, 2)
    snapped = [(d, snap(b, a0, eps), snap(x, a0, eps)) for d, b, x in oracle]
    expected = PersistenceDiagram(r for r in snapped if r[2] > r[1])
    assert got.almost_equal(expected, 1e-12)


def test_net_count_never_exceeds_plain_cech():
    pts = gen_circle_wedge([20, 20], [1, 2], 0.02, seed=7)
    values = np.sort(np.fromiter(enumerate_cech(pts, 2.0, 2).values(), float))
    trace = Trace()
    run_net_persistence(pts, 0.05, 0.3, 2.0, 2, trace=trace)
    assert any(tag == "collapse" for _, _, tag in trace.samples)
    for s, count, _ in trace.samples:
        assert count <= np.searchsorted(values, s, side="right")


def test_memory_cap():
    pts = gen_circle_wedge([20, 20], [1, 2], 0.02, seed=7)
    trace = Trace()
    with pytest.raises(MemoryCapExceeded) as info:
        run_net_persistence(pts, 0.05, 0.2, 2.0, 2, max_simplices=100, trace=trace)
    assert info.value.count == 101
    assert info.value.trace is trace and len(trace) > 0
    assert info.value.diagram is not None
