# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: move-to-front miniball, batched coface radii, Z/2 rank.

Same call signatures and results as ``_kernels_py``.  Point sets of ambient
dimension above ``MAXD`` and numerically degenerate supports are handed back
to the pure-Python implementation.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY
from libc.stdlib cimport malloc, free
from libc.string cimport memset, memcpy
from libc.stdint cimport uint64_t

from . import _kernels_py

cnp.import_array()

cdef enum:
    MAXD = 16
cdef double INSIDE_RTOL = 1e-12


cdef int _circumball(const double* pts, const int* sup, int k, int dim,
                     double* center, double* r2) noexcept nogil:
    cdef double v[MAXD][MAXD]
    cdef double g[MAXD][MAXD + 1]
    cdef double lam[MAXD]
    cdef double scale = 0.0, f, tmp, s
    cdef int i, j, t, m, col, piv, r, c
    cdef const double* p0
    if k == 0:
        r2[0] = -1.0
        return 0
    p0 = pts + sup[0] * dim
    if k == 1:
        for t in range(dim):
            center[t] = p0[t]
        r2[0] = 0.0
        return 0
    m = k - 1
    for i in range(m):
        for t in range(dim):
            v[i][t] = pts[sup[i + 1] * dim + t] - p0[t]
    for i in range(m):
        for j in range(m):
            s = 0.0
            for t in range(dim):
                s += v[i][t] * v[j][t]
            g[i][j] = s
        g[i][m] = 0.5 * g[i][i]
        if fabs(g[i][i]) > scale:
            scale = fabs(g[i][i])
    for col in range(m):
        piv = col
        for r in range(col + 1, m):
            if fabs(g[r][col]) > fabs(g[piv][col]):
                piv = r
        if fabs(g[piv][col]) <= 1e-14 * scale:
            return 1
        if piv != col:
            for c in range(m + 1):
                tmp = g[col][c]
                g[col][c] = g[piv][c]
                g[piv][c] = tmp
        for r in range(col + 1, m):
            f = g[r][col] / g[col][col]
            if f != 0.0:
                for c in range(col, m + 1):
                    g[r][c] -= f * g[col][c]
    for r in range(m - 1, -1, -1):
        s = g[r][m]
        for c in range(r + 1, m):
            s -= g[r][c] * lam[c]
        lam[r] = s / g[r][r]
    s = 0.0
    for t in range(dim):
        tmp = 0.0
        for j in range(m):
            tmp += lam[j] * v[j][t]
        center[t] = p0[t] + tmp
        s += tmp * tmp
    r2[0] = s
    return 0


cdef inline bint _outside(const double* p, const double* c, double r2, int dim) noexcept nogil:
    cdef double d2 = 0.0, diff
    cdef int t
    if r2 < 0.0:
        return True
    for t in range(dim):
        diff = p[t] - c[t]
        d2 += diff * diff
    return d2 > r2 + INSIDE_RTOL * (r2 if r2 > 1e-300 else 1e-300)


cdef int _mtf(const double* pts, int* order, int n, int* sup, int k, int dim,
              double* center, double* r2) noexcept nogil:
    cdef double c[MAXD]
    cdef double rr
    cdef int i, j, idx
    if _circumball(pts, sup, k, dim, c, &rr):
        return 1
    if k < dim + 1:
        i = 0
        while i < n:
            idx = order[i]
            if _outside(pts + idx * dim, c, rr, dim):
                sup[k] = idx
                if _mtf(pts, order, i, sup, k + 1, dim, c, &rr):
                    return 1
                j = i
                while j > 0:
                    order[j] = order[j - 1]
                    j -= 1
                order[0] = idx
            i += 1
    for j in range(dim):
        center[j] = c[j]
    r2[0] = rr
    return 0


cdef int _miniball_buf(const double* pts, int n, int dim, int* order, int* sup,
                       double* center, double* r2) noexcept nogil:
    cdef int i
    for i in range(n):
        order[i] = i
    return _mtf(pts, order, n, sup, 0, dim, center, r2)


def miniball(points):
    """Welzl move-to-front smallest enclosing ball; returns ``(center, radius)``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] arr
    arr = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(len(points), -1))
    cdef int n = arr.shape[0], dim = arr.shape[1]
    if n == 0:
        raise ValueError("miniball of an empty point set")
    if dim > MAXD - 1:
        return _kernels_py.miniball(points)
    cdef double center[MAXD]
    cdef double r2
    cdef int sup[MAXD + 1]
    cdef int* order = <int*> malloc(n * sizeof(int))
    cdef int bad
    try:
        bad = _miniball_buf(&arr[0, 0], n, dim, order, sup, center, &r2)
    finally:
        free(order)
    if bad:
        return _kernels_py.miniball(points)
    return [center[t] for t in range(dim)], sqrt(r2 if r2 > 0.0 else 0.0)


def miniball_radius(points):
    return miniball(points)[1]


def coface_radii(simplex_pts, cand_pts, double cutoff):
    """Miniball radius of ``simplex_pts + [c]`` per candidate; ``inf`` when pruned."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] sp = np.ascontiguousarray(
        np.asarray(simplex_pts, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] cp = np.ascontiguousarray(
        np.asarray(cand_pts, dtype=np.float64).reshape(len(cand_pts), sp.shape[1]))
    cdef int k = sp.shape[0], dim = sp.shape[1], nc = cp.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.full(nc, np.inf)
    if nc == 0:
        return out
    if dim > MAXD - 1 or k + 1 > 64:
        return _kernels_py.coface_radii(simplex_pts, cand_pts, cutoff)
    cdef double buf[64 * MAXD]
    cdef int order[64]
    cdef int sup[MAXD + 1]
    cdef double center[MAXD]
    cdef double r2, d2, diff, lim = 4.0 * cutoff * cutoff
    cdef int i, v, t, bad
    cdef bint skip
    memcpy(buf, &sp[0, 0], k * dim * sizeof(double))
    retry = []
    with nogil:
        for i in range(nc):
            skip = False
            for v in range(k):
                d2 = 0.0
                for t in range(dim):
                    diff = cp[i, t] - buf[v * dim + t]
                    d2 += diff * diff
                if d2 > lim:
                    skip = True
                    break
            if skip:
                continue
            for t in range(dim):
                buf[k * dim + t] = cp[i, t]
            bad = _miniball_buf(buf, k + 1, dim, order, sup, center, &r2)
            if bad:
                with gil:
                    retry.append(i)
            else:
                out[i] = sqrt(r2 if r2 > 0.0 else 0.0)
    base = [tuple(p) for p in sp]
    for i in retry:
        out[i] = _kernels_py.miniball(base + [tuple(cp[i])])[1]
    return out


def z2_rank(columns, int nrows):
    """Rank over Z/2 of the matrix whose j-th column has ones at ``columns[j]``."""
    cdef int words = (nrows + 63) // 64
    cdef int ncols = len(columns)
    if ncols == 0 or nrows == 0:
        return 0
    cdef uint64_t* basis = <uint64_t*> malloc(<size_t> ncols * words * sizeof(uint64_t))
    cdef int* pivot = <int*> malloc(nrows * sizeof(int))
    cdef uint64_t* vec
    cdef uint64_t* other
    cdef int rank = 0, r, w, top, i
    cdef uint64_t x
    try:
        for i in range(nrows):
            pivot[i] = -1
        for col in columns:
            vec = basis + <size_t> rank * words
            memset(vec, 0, words * sizeof(uint64_t))
            for r in col:
                if r < 0 or r >= nrows:
                    raise IndexError(f"row index {r} outside 0..{nrows - 1}")
                vec[r >> 6] ^= (<uint64_t> 1) << (r & 63)
            while True:
                top = -1
                for w in range(words - 1, -1, -1):
                    x = vec[w]
                    if x:
                        top = w * 64 + 63 - __builtin_clzll(x)
                        break
                if top < 0:
                    break
                if pivot[top] < 0:
                    pivot[top] = rank
                    rank += 1
                    break
                other = basis + <size_t> pivot[top] * words
                for w in range(words):
                    vec[w] ^= other[w]
    finally:
        free(basis)
        free(pivot)
    return rank


cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil
