"""Point-cloud primitives: distances, miniballs, Cech values, delay embedding
and the synthetic data sets used by the experiments."""
from __future__ import annotations

import math
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import nnls

from . import kernels


class Ball(NamedTuple):
    center: np.ndarray
    radius: float


class NoLocalMinimum(ValueError):
    """The autocorrelation has no local minimum below the lag limit."""


def as_cloud(points) -> np.ndarray:
    """Validate and convert ``points`` to an ``(N, d)`` float array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"expected a non-empty (N, d) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def euclidean_distance(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(math.sqrt(float(np.sum((p - q) ** 2))))


def min_enclosing_ball(points) -> Ball:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("min_enclosing_ball needs at least one point")
    pts = pts.reshape(len(pts), -1)
    center, radius = kernels.miniball(pts)
    return Ball(np.asarray(center, dtype=float), float(radius))


def cech_value(simplex: Sequence[int], cloud) -> float:
    """Scale at which ``simplex`` enters the Cech filtration of ``cloud``.

    Vertices are sorted first so that the value does not depend on the order
    in which the caller lists them.
    """
    if len(simplex) == 0:
        raise ValueError("empty simplex")
    cloud = np.asarray(cloud, dtype=float)
    idx = sorted(int(v) for v in simplex)
    if idx[0] < 0 or idx[-1] >= len(cloud):
        raise IndexError(f"vertex index out of range for a cloud of {len(cloud)} points")
    if len(idx) == 1:
        return 0.0
    return float(kernels.miniball_radius(cloud[idx]))


def delay_embed(series, delay: int, dim: int) -> np.ndarray:
    """Row ``i`` is ``(y[i], y[i + delay], ..., y[i + (dim - 1) * delay])``."""
    y = np.asarray(series, dtype=float).ravel()
    if delay < 1 or dim < 1:
        raise ValueError("delay and dim must be positive")
    n = len(y) - (dim - 1) * delay
    if n < 1:
        raise ValueError(
            f"series of length {len(y)} too short for delay {delay} and dimension {dim}"
        )
    idx = np.arange(n)[:, None] + delay * np.arange(dim)[None, :]
    return y[idx]


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Normalised autocorrelation ``A(0..max_lag)`` of the mean-removed series."""
    y = np.asarray(series, dtype=float).ravel()
    y = y - y.mean()
    denom = float(np.dot(y, y))
    if denom == 0.0:
        raise ValueError("constant series has no autocorrelation")
    n = len(y)
    return np.array([np.dot(y[: n - i], y[i:]) / denom for i in range(max_lag + 1)])


def first_autocorrelation_minimum(series, max_lag: int) -> int:
    """Smallest lag ``i`` with ``A(i-1) > A(i) < A(i+1)``.

    Raises NoLocalMinimum if no such lag exists with ``i < max_lag``.
    """
    y = np.asarray(series, dtype=float).ravel()
    if max_lag < 2 or len(y) <= max_lag:
        raise ValueError("need 2 <= max_lag < len(series)")
    a = autocorrelation(y, max_lag)
    for i in range(1, max_lag):
        if a[i - 1] > a[i] < a[i + 1]:
            return i
    raise NoLocalMinimum(f"no local minimum of the autocorrelation below lag {max_lag}")


def gen_circle_wedge(counts, radii, noise: float, seed) -> np.ndarray:
    """Noisy samples from circles of radius ``r`` centred at ``(0, r)``.

    Each point gets a uniform angle and a radial distance drawn uniformly from
    ``[(1 - noise) r, (1 + noise) r]``.
    """
    counts = list(counts)
    radii = list(radii)
    if len(counts) != len(radii):
        raise ValueError("counts and radii must have the same length")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    chunks = []
    for n, r in zip(counts, radii):
        if n < 0 or r <= 0:
            raise ValueError("counts must be non-negative and radii positive")
        theta = rng.uniform(0.0, 2 * np.pi, n)
        rho = rng.uniform((1 - noise) * r, (1 + noise) * r, n)
        chunks.append(np.column_stack([rho * np.cos(theta), r + rho * np.sin(theta)]))
    return np.vstack(chunks) if chunks else np.empty((0, 2))


def sphere_points(n: int, dim: int, seed) -> np.ndarray:
    """``n`` uniform points on the unit sphere in R^dim (normalised Gaussians)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def rp2_map(xyz) -> np.ndarray:
    """The even embedding ``(x, y, z) -> (xy, xz, y^2 - z^2, 2yz)`` of RP^2 into R^4."""
    a = np.atleast_2d(np.asarray(xyz, dtype=float))
    x, y, z = a[:, 0], a[:, 1], a[:, 2]
    out = np.column_stack([x * y, x * z, y * y - z * z, 2 * y * z])
    return out[0] if np.ndim(xyz) == 1 else out


def gen_rp2(n: int, seed) -> np.ndarray:
    return rp2_map(sphere_points(n, 3, seed))


def _lorenz_rhs(s, sigma=10.0, r=28.0, b=8.0 / 3.0):
    x, y, z = s
    return np.array([sigma * (y - x), x * (r - z) - y, x * y - b * z])


def rk4_step(s, h):
    k1 = _lorenz_rhs(s)
    k2 = _lorenz_rhs(s + 0.5 * h * k1)
    k3 = _lorenz_rhs(s + 0.5 * h * k2)
    k4 = _lorenz_rhs(s + h * k3)
    return s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def gen_lorenz(n: int, step: float = 0.01, initial=(1.0, 1.0, 1.0), stride: int = 1) -> np.ndarray:
    """Summed coordinates ``x + y + z`` of a Lorenz trajectory at ``n`` sample times.

    The system (sigma=10, r=28, b=8/3) is integrated with fixed-step RK4 of
    size ``step``; a sample is recorded every ``stride`` steps, starting with
    the initial state.
    """
    if n < 1 or step <= 0 or stride < 1:
        raise ValueError("need n >= 1, step > 0 and stride >= 1")
    s = np.asarray(initial, dtype=float)
    out = np.empty(n)
    for i in range(n):
        out[i] = s.sum()
        if i == n - 1:
            break
        for _ in range(stride):
            s = rk4_step(s, step)
        if not np.all(np.isfinite(s)):
            raise FloatingPointError(f"Lorenz state became non-finite at sample {i + 1}")
    return out


LORENZ_STEP = 0.01
LORENZ_STRIDE = 3
LORENZ_TRANSIENT = 1000


def lorenz_series(length: int, transient: int = LORENZ_TRANSIENT) -> np.ndarray:
    """``length`` samples of ``x + y + z`` after discarding ``transient`` samples.

    Integration uses RK4 with step 0.01, sampled every third step.
    """
    y = gen_lorenz(length + transient, step=LORENZ_STEP, stride=LORENZ_STRIDE)
    return y[transient:]


def lorenz_embedding(length: int = 15000, dim: int = 3, max_lag: int = 100):
    """Delay embedding of the summed Lorenz series at its first autocorrelation minimum.

    Returns ``(cloud, delay)``.
    """
    y = lorenz_series(length)
    delay = first_autocorrelation_minimum(y, max_lag)
    return delay_embed(y, delay, dim), delay


def hull_distance(points, x, weight: float = 1e4) -> float:
    """Euclidean distance from ``x`` to the convex hull of ``points``.

    Solved as a non-negative least-squares feasibility problem with the
    affine constraint appended as a heavily weighted row; zero (to solver
    precision) means ``x`` lies in the hull.
    """
    pts = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    a = np.vstack([pts.T, weight * np.ones(len(pts))])
    rhs = np.concatenate([x, [weight]])
    lam, _ = nnls(a, rhs)
    lam = lam / lam.sum()
    return float(np.linalg.norm(pts.T @ lam - x))


def read_cloud(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: malformed point line {line!r}") from exc
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: points have inconsistent dimensions")
    return as_cloud(rows)


def write_cloud(path, points, comment: str | None = None) -> None:
    pts = as_cloud(points)
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in pts)
    Path(path).write_text("\n".join(lines) + "\n")
