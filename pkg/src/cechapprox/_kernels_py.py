"""Pure-Python versions of the hot kernels.

These mirror the compiled module ``_ckernels`` function for function and are
used whenever the extension is unavailable (or ``CECHAPPROX_PURE_PYTHON`` is
set).  Inputs are plain sequences of float tuples; outputs are floats/ints.
"""
from __future__ import annotations

import math

import numpy as np

_INSIDE_RTOL = 1e-12


def _circumball(support):
    """Smallest ball with every support point on its boundary.

    Returns ``(center, r2)``; ``r2 = -1`` for the empty support.  Raises
    ``np.linalg.LinAlgError`` if the support is affinely dependent.
    """
    k = len(support)
    if k == 0:
        return None, -1.0
    p0 = support[0]
    if k == 1:
        return list(p0), 0.0
    d = len(p0)
    vs = [[q[t] - p0[t] for t in range(d)] for q in support[1:]]
    m = k - 1
    gram = [[sum(vs[i][t] * vs[j][t] for t in range(d)) for j in range(m)] for i in range(m)]
    rhs = [0.5 * gram[i][i] for i in range(m)]
    lam = _solve(gram, rhs)
    center = [p0[t] + sum(lam[j] * vs[j][t] for j in range(m)) for t in range(d)]
    r2 = sum((center[t] - p0[t]) ** 2 for t in range(d))
    return center, r2


def _solve(a, b):
    # Gaussian elimination with partial pivoting on tiny dense systems.
    n = len(b)
    a = [row[:] + [b[i]] for i, row in enumerate(a)]
    scale = max((abs(a[i][i]) for i in range(n)), default=0.0)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) <= 1e-14 * scale:
            raise np.linalg.LinAlgError("degenerate support set")
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n + 1):
                    a[r][c] -= f * a[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))) / a[r][r]
    return x


def _outside(p, center, r2):
    if center is None:
        return True
    d2 = 0.0
    for t in range(len(p)):
        diff = p[t] - center[t]
        d2 += diff * diff
    return d2 > r2 + _INSIDE_RTOL * max(r2, 1e-300)


def _mtf(pts, n, support, dim):
    center, r2 = _circumball(support)
    if len(support) == dim + 1:
        return center, r2
    i = 0
    while i < n:
        p = pts[i]
        if _outside(p, center, r2):
            center, r2 = _mtf(pts, i, support + [p], dim)
            pts.insert(0, pts.pop(i))
        i += 1
    return center, r2


def miniball(points):
    """Welzl move-to-front smallest enclosing ball.

    ``points`` is a non-empty sequence of equal-length coordinate sequences.
    Returns ``(center, radius)`` with ``center`` a list of floats.
    """
    pts = [tuple(float(x) for x in p) for p in points]
    if not pts:
        raise ValueError("miniball of an empty point set")
    dim = len(pts[0])
    try:
        center, r2 = _mtf(pts, len(pts), [], dim)
    except np.linalg.LinAlgError:
        center, r2 = _miniball_lstsq(pts)
    return center, math.sqrt(max(r2, 0.0))


def _miniball_lstsq(pts):
    # Degenerate fallback: exhaustive support search with pseudo-inverse circumcentres.
    from itertools import combinations

    arr = np.asarray(pts, dtype=float)
    dim = arr.shape[1]
    best = None
    for k in range(1, min(len(pts), dim + 1) + 1):
        for sub in combinations(range(len(pts)), k):
            s = arr[list(sub)]
            v = s[1:] - s[0]
            if k == 1:
                c = s[0]
            else:
                g = v @ v.T
                lam = np.linalg.pinv(g) @ (0.5 * np.diag(g))
                c = s[0] + lam @ v
            r2 = float(np.max(np.sum((arr - c) ** 2, axis=1)))
            if best is None or r2 < best[1]:
                best = (list(map(float, c)), r2)
    return best


def miniball_radius(points):
    return miniball(points)[1]


def coface_radii(simplex_pts, cand_pts, cutoff):
    """Miniball radius of ``simplex_pts + [c]`` for every candidate ``c``.

    Candidates that provably exceed ``cutoff`` (half their largest distance
    to a simplex vertex is already beyond it) get ``inf`` without a miniball
    solve.  Returns a float numpy array aligned with ``cand_pts``.
    """
    sp = np.asarray(simplex_pts, dtype=float)
    cp = np.asarray(cand_pts, dtype=float)
    out = np.full(len(cp), np.inf)
    if len(cp) == 0:
        return out
    far = np.sqrt(((cp[:, None, :] - sp[None, :, :]) ** 2).sum(axis=2)).max(axis=1) * 0.5
    base = [tuple(map(float, p)) for p in sp]
    for idx in np.flatnonzero(far <= cutoff):
        out[idx] = miniball(base + [tuple(map(float, cp[idx]))])[1]
    return out


def z2_rank(columns, nrows):
    """Rank over Z/2 of the matrix whose j-th column has ones at ``columns[j]``."""
    pivots = {}
    rank = 0
    for col in columns:
        v = 0
        for r in col:
            if not 0 <= r < nrows:
                raise IndexError(f"row index {r} outside 0..{nrows - 1}")
            v ^= 1 << r
        while v:
            top = v.bit_length() - 1
            other = pivots.get(top)
            if other is None:
                pivots[top] = v
                rank += 1
                break
            v ^= other
    return rank
