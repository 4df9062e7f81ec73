"""Ground truth and comparison tools.

* ``oracle_cech``: brute-force Cech filtration plus textbook column
  reduction, sharing no code with the annotation engine (its own miniball by
  exhaustive support search, its own enumeration and reduction).
* bottleneck distances (linear and log scale) between diagrams.
* Cech/Rips inclusion checks and convex-hull sampling checks.
* SVG plots of diagrams and simplex-count traces.
"""
from __future__ import annotations

import io
import math
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial import Delaunay

from .geometry import as_cloud, hull_distance
from .persistence import ZERO_LENGTH_RTOL, PersistenceDiagram

DEFAULT_ORACLE_LIMIT = 200_000
MEMBERSHIP_RTOL = 1e-12


class OracleTooLarge(ValueError):
    pass


# -- oracle -----------------------------------------------------------------


def exhaustive_miniball_radius(pts) -> float:
    """Smallest enclosing radius by trying every support set of size <= d + 1.

    Exponential in the number of points; meant for the handful of vertices of
    a simplex.  The ball through a support set is its circumball within the
    affine hull, found by least squares.
    """
    pts = np.asarray(pts, dtype=float)
    n, d = pts.shape
    if n == 1:
        return 0.0
    best = math.inf
    for k in range(2, min(n, d + 1) + 1):
        for sub in combinations(range(n), k):
            s = pts[list(sub)]
            v = s[1:] - s[0]
            g = v @ v.T
            lam = np.linalg.lstsq(g, 0.5 * np.diag(g), rcond=None)[0]
            c = s[0] + lam @ v
            r = float(np.sqrt(np.max(np.sum((pts - c) ** 2, axis=1))))
            best = min(best, r)
    return best


def enumerate_cech(points, alpha: float, max_dim: int, limit: int = DEFAULT_ORACLE_LIMIT,
                   rtol: float = 0.0):
    """All simplices of dimension <= ``max_dim`` with Cech value <= ``alpha``.

    Returns ``{simplex: value}``.  A simplex's value is the maximum of its
    own miniball radius and its facets' values, which equals the miniball
    radius up to rounding and keeps the filtration monotone.  ``rtol``
    widens the membership test, for inclusion checks at exact boundary cases.
    """
    pts = as_cloud(points)
    n = len(pts)
    tol = alpha * (1 + rtol)
    values: dict[tuple[int, ...], float] = {(i,): 0.0 for i in range(n)}
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    layer = [(i,) for i in range(n)]
    for dim in range(1, max_dim + 1):
        nxt = []
        for s in layer:
            for v in range(s[-1] + 1, n):
                if any(dist[u, v] > 2 * tol for u in s):
                    continue
                t = s + (v,)
                facets = [t[:i] + t[i + 1:] for i in range(len(t))]
                if any(f not in values for f in facets):
                    continue
                r = max(exhaustive_miniball_radius(pts[list(t)]), max(values[f] for f in facets))
                if r <= tol:
                    values[t] = r
                    nxt.append(t)
            if len(values) > limit:
                raise OracleTooLarge(f"oracle complex exceeds {limit} simplices")
        layer = nxt
    return values


def reduce_filtration(ordered: list[tuple[tuple[int, ...], float]]) -> list[tuple[int, float, float]]:
    """Standard Z/2 column reduction; returns ``(dim, birth, death)`` pairs."""
    index = {s: k for k, (s, _) in enumerate(ordered)}
    low_owner: dict[int, int] = {}
    reduced: list[int] = []
    paired = set()
    out = []
    for k, (s, val) in enumerate(ordered):
        col = 0
        if len(s) > 1:
            for i in range(len(s)):
                col |= 1 << index[s[:i] + s[i + 1:]]
        while col:
            low = col.bit_length() - 1
            other = low_owner.get(low)
            if other is None:
                break
            col ^= reduced[other]
        reduced.append(col)
        if col:
            low = col.bit_length() - 1
            low_owner[low] = k
            paired.add(low)
            paired.add(k)
            bs, bval = ordered[low]
            out.append((len(bs) - 1, bval, val))
    for k, (s, val) in enumerate(ordered):
        if k not in paired:
            out.append((len(s) - 1, val, math.inf))
    return out


def oracle_cech(points, alpha_max: float, max_dim: int, limit: int = DEFAULT_ORACLE_LIMIT) -> PersistenceDiagram:
    """Exact Cech persistence up to ``alpha_max`` on simplices of dimension <= ``max_dim``.

    Homology is reported in dimensions ``0 .. max_dim - 1``.
    """
    values = enumerate_cech(points, alpha_max, max_dim, limit)
    ordered = sorted(values.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))
    rows = [
        (d, b, x) for d, b, x in reduce_filtration(ordered)
        if d < max_dim and (math.isinf(x) or x - b > ZERO_LENGTH_RTOL * max(1.0, x))
    ]
    return PersistenceDiagram(rows)


def boundary_ranks(simplices) -> dict[int, int]:
    """Betti numbers over Z/2 of the complex spanned by ``simplices``."""
    from .kernels import z2_rank

    by_dim: dict[int, list] = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(tuple(sorted(s)))
    index = {p: {s: i for i, s in enumerate(v)} for p, v in by_dim.items()}
    rank = {0: 0}
    for p, simp in by_dim.items():
        if p == 0:
            continue
        cols = [[index[p - 1][s[:i] + s[i + 1:]] for i in range(len(s))] for s in simp]
        rank[p] = z2_rank(cols, len(by_dim[p - 1]))
    out = {}
    for p, simp in sorted(by_dim.items()):
        b = len(simp) - rank.get(p, 0) - rank.get(p + 1, 0)
        if b:
            out[p] = b
    return out


# -- distances --------------------------------------------------------------


def _finite_bottleneck(a: np.ndarray, b: np.ndarray) -> float:
    n, m = len(a), len(b)
    if n == 0 and m == 0:
        return 0.0
    half_a = (a[:, 1] - a[:, 0]) / 2 if n else np.empty(0)
    half_b = (b[:, 1] - b[:, 0]) / 2 if m else np.empty(0)
    if n and m:
        cost = np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1]))
    else:
        cost = np.empty((n, m))
    cands = np.unique(np.concatenate([cost.ravel(), half_a, half_b, [0.0]]))

    def feasible(c: float) -> bool:
        # rows: a points then diagonal slots for b; columns: b points then slots for a
        rows, cols = [], []
        ai, bj = np.nonzero(cost <= c)
        rows.extend(ai.tolist())
        cols.extend(bj.tolist())
        for i in np.flatnonzero(half_a <= c):
            rows.append(int(i))
            cols.append(m + int(i))
        for j in np.flatnonzero(half_b <= c):
            rows.append(n + int(j))
            cols.append(int(j))
        dr, dc = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        rows.extend((n + dr.ravel()).tolist())
        cols.extend((m + dc.ravel()).tolist())
        g = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n + m, n + m))
        match = maximum_bipartite_matching(g, perm_type="column")
        return bool(np.all(match >= 0))

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def _bottleneck_points(a: np.ndarray, b: np.ndarray) -> float:
    a_inf = np.isinf(a[:, 1]) if len(a) else np.zeros(0, bool)
    b_inf = np.isinf(b[:, 1]) if len(b) else np.zeros(0, bool)
    if a_inf.sum() != b_inf.sum():
        return math.inf
    inf_cost = 0.0
    if a_inf.any():
        inf_cost = float(np.max(np.abs(np.sort(a[a_inf, 0]) - np.sort(b[b_inf, 0]))))
    return max(inf_cost, _finite_bottleneck(a[~a_inf], b[~b_inf]))


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram, dim: int) -> float:
    """Bottleneck distance between the dimension-``dim`` parts of two diagrams.

    Points may be matched to each other or to the diagonal under the sup
    norm.  Points with infinite death only match each other (cost is the
    birth difference); unequal counts of them give ``inf``.
    """
    return _bottleneck_points(d1.in_dim(dim), d2.in_dim(dim))


def log_diagram(diagram: PersistenceDiagram, floor: float) -> PersistenceDiagram:
    """``(b, d) -> (log max(b, floor), log max(d, floor))``; intervals collapsing to a point drop out."""
    if not floor > 0:
        raise ValueError("floor must be positive")
    rows = []
    for dim, b, x in diagram:
        lb = math.log(max(b, floor))
        lx = math.inf if math.isinf(x) else math.log(max(x, floor))
        if lx > lb:
            rows.append((dim, lb, lx))
    return PersistenceDiagram(rows)


def log_bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram, dim: int, floor: float) -> float:
    return bottleneck(log_diagram(d1, floor), log_diagram(d2, floor), dim)


def brute_force_bottleneck(a, b) -> float:
    """Bottleneck by trying every partial matching; for tiny point sets only."""
    a = [tuple(p) for p in np.asarray(a, dtype=float).reshape(-1, 2)]
    b = [tuple(p) for p in np.asarray(b, dtype=float).reshape(-1, 2)]

    def cost(p, q):
        if math.isinf(p[1]) or math.isinf(q[1]):
            return abs(p[0] - q[0]) if math.isinf(p[1]) and math.isinf(q[1]) else math.inf
        return max(abs(p[0] - q[0]), abs(p[1] - q[1]))

    def diag(p):
        return math.inf if math.isinf(p[1]) else (p[1] - p[0]) / 2

    best = math.inf

    def rec(i, used, worst):
        nonlocal best
        if worst >= best:
            return
        if i == len(a):
            rest = max((diag(b[j]) for j in range(len(b)) if j not in used), default=0.0)
            best = min(best, max(worst, rest))
            return
        rec(i + 1, used, max(worst, diag(a[i])))
        for j in range(len(b)):
            if j not in used:
                rec(i + 1, used | {j}, max(worst, cost(a[i], b[j])))

    rec(0, frozenset(), 0.0)
    return best


# -- inclusion checks ---------------------------------------------------------


def rips_simplices(points, alpha: float, max_dim: int) -> set:
    """Cliques of the graph joining points at distance <= ``2 alpha``."""
    pts = as_cloud(points)
    n = len(pts)
    tol = 2 * alpha * (1 + MEMBERSHIP_RTOL)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    out = set()
    layer = [(i,) for i in range(n)]
    out.update(layer)
    for _ in range(max_dim):
        layer = [s + (v,) for s in layer for v in range(s[-1] + 1, n) if all(dist[u, v] <= tol for u in s)]
        out.update(layer)
    return out


def sandwich_sets(points, alpha: float, max_dim: int):
    cech = set(enumerate_cech(points, alpha, max_dim, rtol=MEMBERSHIP_RTOL))
    rips = rips_simplices(points, alpha, max_dim)
    wide = set(enumerate_cech(points, math.sqrt(2) * alpha, max_dim, rtol=MEMBERSHIP_RTOL))
    return cech, rips, wide


def cech_rips_sandwich_check(points, alpha: float, max_dim: int) -> bool:
    """Whether ``C(alpha) <= R(alpha) <= C(sqrt(2) alpha)`` as simplex sets."""
    cech, rips, wide = sandwich_sets(points, alpha, max_dim)
    return cech <= rips <= wide


def sandwich_checks(points, alphas, max_dim: int) -> list[bool]:
    """``cech_rips_sandwich_check`` at several scales, enumerating Cech
    values once at the widest scale and thresholding them."""
    alphas = [float(a) for a in alphas]
    values = enumerate_cech(points, math.sqrt(2) * max(alphas, default=0.0), max_dim,
                            rtol=MEMBERSHIP_RTOL)
    out = []
    for a in alphas:
        cech = {s for s, v in values.items() if v <= a * (1 + MEMBERSHIP_RTOL)}
        wide = {s for s, v in values.items() if v <= math.sqrt(2) * a * (1 + MEMBERSHIP_RTOL)}
        out.append(cech <= rips_simplices(points, a, max_dim) <= wide)
    return out


def uniform_hull_samples(vertices, n_samples: int, rng) -> np.ndarray:
    """Uniform samples from the convex hull of ``vertices``.

    The hull is triangulated, a cell is drawn with probability proportional to
    its volume and a point is drawn uniformly inside it.
    """
    v = np.asarray(vertices, dtype=float)
    tri = Delaunay(v)
    cells = v[tri.simplices]
    vol = np.abs(np.linalg.det(cells[:, 1:] - cells[:, :1]))
    pick = rng.choice(len(cells), size=n_samples, p=vol / vol.sum())
    w = rng.dirichlet(np.ones(v.shape[1] + 1), size=n_samples)
    return np.einsum("nk,nkd->nd", w, cells[pick])


def uniform_ball_hull_samples(centers, alpha: float, n_samples: int, rng, batch: int = 256) -> np.ndarray:
    """Uniform samples from the convex hull of the union of radius-``alpha``
    balls around ``centers``, by rejection from the bounding box.

    That hull is the hull of the centers thickened by ``alpha``, so membership
    is a distance test against the hull of the centers.
    """
    c = np.asarray(centers, dtype=float)
    lo, hi = c.min(axis=0) - alpha, c.max(axis=0) + alpha
    out = []
    while len(out) < n_samples:
        for x in rng.uniform(lo, hi, size=(batch, c.shape[1])):
            if hull_distance(c, x) <= alpha:
                out.append(x)
    return np.array(out[:n_samples])


def _nearest(x: np.ndarray, pts: np.ndarray) -> np.ndarray:
    return np.min(np.linalg.norm(x[:, None, :] - pts[None, :, :], axis=2), axis=1)


def hull_vertex_bound_violations(vertices, alpha: float, n_samples: int, rng, tol: float = 1e-9) -> int:
    """Sample the convex hull of ``vertices`` and count points farther than
    ``alpha / sqrt(2)`` from every vertex.

    The vertices are expected to contain the origin with all of them within
    ``alpha`` of it, and to span the ambient space.
    """
    v = np.asarray(vertices, dtype=float)
    x = uniform_hull_samples(v, n_samples, rng)
    return int(np.sum(_nearest(x, v) > alpha / math.sqrt(2) + tol))


def hull_of_balls_violations(centers, alpha: float, eps: float, n_samples: int, rng, tol: float = 1e-9) -> int:
    """Sample the convex hull of the union of radius-``alpha`` balls and count
    points farther than ``alpha * sqrt(1 + eps^2 / 2)`` from every center.

    The centers are expected to be pairwise within ``eps * alpha``.
    """
    c = np.asarray(centers, dtype=float)
    x = uniform_ball_hull_samples(c, alpha, n_samples, rng)
    return int(np.sum(_nearest(x, c) > alpha * math.sqrt(1 + eps * eps / 2) + tol))


# -- plotting ---------------------------------------------------------------

_COLORS = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_diagram(diagram: PersistenceDiagram, alpha_max: float, path=None, title: str | None = None) -> str:
    """Render a diagram over ``[0, alpha_max]^2`` as SVG.

    Finite intervals are dots, infinite ones triangles on the top edge.  Each
    series is an SVG group with id ``dim<k>-finite`` or ``dim<k>-infinite``.
    Returns the SVG text and writes it to ``path`` if given.
    """
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, alpha_max], [0, alpha_max], color="0.5", lw=1, gid="diagonal")
    for dim in diagram.dims:
        pts = diagram.in_dim(dim)
        color = _COLORS[dim % len(_COLORS)]
        fin = pts[np.isfinite(pts[:, 1])]
        inf = pts[~np.isfinite(pts[:, 1])]
        if len(fin):
            ax.scatter(fin[:, 0], np.minimum(fin[:, 1], alpha_max), s=14, color=color,
                       label=f"H{dim}", gid=f"dim{dim}-finite")
        if len(inf):
            ax.scatter(inf[:, 0], np.full(len(inf), alpha_max), marker="^", s=30, color=color,
                       label=None if len(fin) else f"H{dim}", gid=f"dim{dim}-infinite", clip_on=False)
    ax.set_xlim(0, alpha_max)
    ax.set_ylim(0, alpha_max * 1.02)
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    if diagram.dims:
        ax.legend(loc="lower right")
    svg = _to_svg(fig)
    plt.close(fig)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg


def plot_trace(trace, path=None, title: str | None = None) -> str:
    """Simplex count against scale, with collapse events marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    samples = trace.samples
    if samples:
        s = np.array([x[0] for x in samples])
        c = np.array([x[1] for x in samples])
        ax.plot(np.arange(len(s)), c, lw=1, color="tab:blue", gid="count")
        coll = np.array([i for i, x in enumerate(samples) if x[2] == "collapse"], dtype=int)
        if len(coll):
            ax.scatter(coll, c[coll], marker="v", s=12, color="tab:red", gid="collapses", label="collapse")
            ax.legend(loc="upper left")
        ticks = np.linspace(0, len(s) - 1, min(6, len(s))).astype(int)
        ax.set_xticks(ticks)
        ax.set_xticklabels([f"{s[t]:.3g}" for t in ticks])
    ax.set_xlabel("scale")
    ax.set_ylabel("simplices")
    if title:
        ax.set_title(title)
    svg = _to_svg(fig)
    plt.close(fig)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(svg)
    return svg


def _to_svg(fig) -> str:
    import matplotlib

    buf = io.StringIO()
    # fixed salt and no date keep the element ids and the bytes reproducible
    with matplotlib.rc_context({"svg.hashsalt": "cechapprox"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()
