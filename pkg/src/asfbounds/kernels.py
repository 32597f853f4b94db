"""Epanechnikov kernel density and regression estimators.

Bandwidths follow the rule ``h = s * n**(-1/5)`` with ``s`` the unbiased
sample standard deviation, applied per axis in the bivariate case. Grid
fits carry no boundary correction by default; reflection at the edges of
[0, 1] is available through ``boundary_correction="reflection"``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityFunction, grid_axis
from .exceptions import EstimationError, ZeroVarianceError

__all__ = [
    "epanechnikov",
    "bandwidth_rule",
    "kde_fit",
    "fit_kernel_density",
    "count_density",
    "nadaraya_watson",
    "conditional_mean_complement",
    "KernelFit",
]

_CHUNK = 8192


def epanechnikov(u):
    """Kernel weight ``0.75 * (1 - u**2)`` on [-1, 1], zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)
    return float(out) if out.ndim == 0 else out


def bandwidth_rule(sample) -> float:
    """Rule-of-thumb bandwidth ``s * n**(-1/5)``.

    Raises :class:`ZeroVarianceError` for constant samples; that usually
    means the reports are discrete and count densities should be used.
    """
    sample = np.asarray(sample, dtype=float).ravel()
    n = sample.size
    if n < 2:
        raise EstimationError(f"bandwidth rule needs at least two observations, got {n}")
    s = float(np.std(sample, ddof=1))
    # constant samples can leave rounding residue in the accumulated std
    if s < 1e-12:
        raise ZeroVarianceError("sample has zero variance; switch to count densities")
    return s * n ** (-0.2)


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] not in (1, 2):
        raise ValueError("points must have one or two coordinates per row")
    return points


def _as_bandwidths(bandwidths, dim: int) -> np.ndarray:
    h = np.atleast_1d(np.asarray(bandwidths, dtype=float))
    if h.size == 1:
        h = np.repeat(h, dim)
    if h.size != dim:
        raise ValueError(f"expected {dim} bandwidths, got {h.size}")
    if np.any(h <= 0):
        raise ValueError("bandwidths must be positive")
    return h


def _reflected(points: np.ndarray) -> np.ndarray:
    """Sample augmented with its reflections about 0 and 1, per axis."""
    out = points
    for axis in range(points.shape[1]):
        low = out.copy()
        low[:, axis] = -low[:, axis]
        high = out.copy()
        high[:, axis] = 2.0 - high[:, axis]
        out = np.vstack([out, low, high])
    return out


def _axis_kernel(grid: np.ndarray, pts: np.ndarray, h: float) -> np.ndarray:
    """Matrix ``K((g_i - p_j) / h)`` of shape (len(grid), len(pts))."""
    u = (grid[:, None] - pts[None, :]) / h
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def kde_fit(points, bandwidths, m_grid: int = 1001,
            boundary_correction: str = "none") -> DensityFunction:
    """Product-Epanechnikov density estimate tabulated on the unit grid.

    ``points`` lie in [0, 1]^dim with dim 1 or 2; ``bandwidths`` is a scalar
    or one value per axis. The returned grid density may integrate to less
    than one when mass leaks past the boundary and no correction is applied.
    """
    pts = _as_points(points)
    n, dim = pts.shape
    if n == 0:
        raise EstimationError("kernel fit needs at least one observation")
    if np.any(pts < 0) or np.any(pts > 1):
        raise ValueError("points must lie in the unit interval/square")
    h = _as_bandwidths(bandwidths, dim)
    eval_pts = _reflected(pts) if boundary_correction == "reflection" else pts

    grid = grid_axis(m_grid)
    if dim == 1:
        values = np.zeros(m_grid)
        for start in range(0, eval_pts.shape[0], _CHUNK):
            chunk = eval_pts[start:start + _CHUNK, 0]
            values += _axis_kernel(grid, chunk, h[0]).sum(axis=1)
        values /= n * h[0]
    else:
        values = np.zeros((m_grid, m_grid))
        for start in range(0, eval_pts.shape[0], _CHUNK):
            chunk = eval_pts[start:start + _CHUNK]
            k0 = _axis_kernel(grid, chunk[:, 0], h[0])
            k1 = _axis_kernel(grid, chunk[:, 1], h[1])
            values += k0 @ k1.T
        values /= n * h[0] * h[1]
    return DensityFunction.from_grid(values, normalization_tol=None)


@dataclass(frozen=True)
class KernelFit:
    """A fitted kernel density together with the bandwidths that produced it.

    Bootstrap refits reuse ``bandwidths`` so that resampling perturbs the
    distribution being smoothed, not the amount of smoothing.
    """

    bandwidths: tuple[float, ...]
    n: int
    density: DensityFunction

    def __post_init__(self):
        if any(h <= 0 for h in self.bandwidths):
            raise ValueError("bandwidths must be positive")


def fit_kernel_density(points, m_grid: int = 1001,
                       boundary_correction: str = "none") -> KernelFit:
    """Fit with per-axis rule-of-thumb bandwidths and record them."""
    pts = _as_points(points)
    h = tuple(bandwidth_rule(pts[:, a]) for a in range(pts.shape[1]))
    density = kde_fit(pts, h, m_grid, boundary_correction)
    return KernelFit(bandwidths=h, n=pts.shape[0], density=density)


def count_density(points) -> DensityFunction:
    """Empirical frequencies of the distinct values, as an atom density."""
    pts = _as_points(points)
    if pts.shape[0] == 0:
        raise EstimationError("count density needs at least one observation")
    uniq, counts = np.unique(pts, axis=0, return_counts=True)
    masses = counts / counts.sum()
    support = uniq[:, 0] if uniq.shape[1] == 1 else uniq
    return DensityFunction.from_atoms(support, masses)


def _nw_batch(d: np.ndarray, pts: np.ndarray, queries: np.ndarray,
              h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Kernel-weighted means of ``d`` at each query; flags zero-weight queries."""
    num = np.zeros(queries.shape[0])
    den = np.zeros(queries.shape[0])
    for start in range(0, queries.shape[0], _CHUNK // 4):
        q = queries[start:start + _CHUNK // 4]
        w = _axis_kernel(q[:, 0], pts[:, 0], h[0])
        if pts.shape[1] == 2:
            w *= _axis_kernel(q[:, 1], pts[:, 1], h[1])
        num[start:start + q.shape[0]] = w @ d
        den[start:start + q.shape[0]] = w.sum(axis=1)
    zero = den == 0.0
    vals = np.divide(num, den, out=np.zeros_like(num), where=~zero)
    return vals, zero


def nadaraya_watson(d, p, query, bandwidths) -> float:
    """Locally weighted mean of binary ``d`` at ``query``.

    Weights are product Epanechnikov kernels; the result is a convex
    combination of the ``d`` values and therefore lies in [0, 1]. Raises
    :class:`EstimationError` when no observation falls in the kernel window.
    """
    d = np.asarray(d, dtype=float).ravel()
    pts = _as_points(p)
    if d.size != pts.shape[0] or d.size == 0:
        raise ValueError("d and p must have equal, positive length")
    h = _as_bandwidths(bandwidths, pts.shape[1])
    q = np.asarray(query, dtype=float).reshape(1, -1)
    if q.shape[1] != pts.shape[1]:
        raise ValueError("query dimension does not match the sample")
    vals, zero = _nw_batch(d, pts, q, h)
    if zero[0]:
        raise EstimationError(
            "zero kernel weight at the query point; widen the bandwidth or skip it"
        )
    return float(vals[0])


def conditional_mean_complement(dataset, x: int, z=None) -> float:
    """Mean of ``1 - d`` over the (x, z) cell of a revealed or matched dataset."""
    sub = dataset.subsample(x) if z is None else dataset.subsample(x, z)
    if len(sub) == 0:
        raise EstimationError(f"empty subsample for x={x}" + ("" if z is None else f", z={z}"))
    return float(np.mean(1.0 - sub.d))
