"""Sharp bounds on the average structural function via dual programs.

With ``f_c`` the conditional report density given ``(X, Z) = (x, z)``,
``f_m`` the marginal report density and ``e = E[1 - D | X = x, Z = z]``,
the per-cell bounds are

* lower:  ``sup_phi  integral min(phi * f_c, f_m) dp - phi * e``
* upper:  ``inf_phi  integral max(-phi * f_c, f_m) dp + phi * e``

and the exclusion restriction tightens them to the max/min over ``z``. The
objectives are convex (resp. concave) piecewise-smooth functions of the
scalar dual variable, so a coarse scan followed by golden-section
refinement finds the optimum without derivatives.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import AnalysisConfig
from .density import DensityFunction, trapezoid_weights, union_atom_values, grid_axis
from .exceptions import BoxBindingWarning
from .theta import ThetaCell, ThetaEstimate

__all__ = [
    "BoundsResult",
    "CellBounds",
    "objective_upper",
    "objective_lower",
    "optimize_scalar",
    "bounds_given_z",
    "bounds_with_exclusion",
    "moment_bounds_generic_h",
    "two_point_closed_form",
]

_SCAN_POINTS = 257
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# representation alignment

def aligned_values(f_cond: DensityFunction, f_marg: DensityFunction):
    """Common value arrays and quadrature weights for a density pair.

    Grid pair: both tabulations flattened on the shared grid with trapezoid
    weights. Atom pair: masses on the union support with unit weights, so
    the weighted sum is the exact finite sum.
    """
    if f_cond.kind != f_marg.kind:
        raise ValueError(
            f"density representations do not match: {f_cond.kind} vs {f_marg.kind}"
        )
    if f_cond.kind == "grid":
        if f_cond.values.shape != f_marg.values.shape:
            raise ValueError("grid densities are tabulated on different grids")
        m = f_cond.values.shape[0]
        w = trapezoid_weights(m)
        if f_cond.dim == 2:
            w = np.outer(w, w).ravel()
        return f_cond.values.ravel(), f_marg.values.ravel(), w
    _, (vc, vm) = union_atom_values([f_cond, f_marg])
    return vc, vm, np.ones_like(vc)


# ---------------------------------------------------------------------------
# dual objectives

def _upper_values(phis: np.ndarray, vc, vm, w, e) -> np.ndarray:
    return np.maximum(-phis[:, None] * vc[None, :], vm[None, :]) @ w + phis * e


def _lower_values(phis: np.ndarray, vc, vm, w, e) -> np.ndarray:
    return np.minimum(phis[:, None] * vc[None, :], vm[None, :]) @ w - phis * e


def objective_upper(phi: float, f_cond: DensityFunction, f_marg: DensityFunction,
                    e: float) -> float:
    """Upper-bound dual objective at ``phi``; convex in ``phi``."""
    vc, vm, w = aligned_values(f_cond, f_marg)
    return float(_upper_values(np.atleast_1d(float(phi)), vc, vm, w, e)[0])


def objective_lower(phi: float, f_cond: DensityFunction, f_marg: DensityFunction,
                    e: float) -> float:
    """Lower-bound dual objective at ``phi``; concave in ``phi``."""
    vc, vm, w = aligned_values(f_cond, f_marg)
    return float(_lower_values(np.atleast_1d(float(phi)), vc, vm, w, e)[0])


# ---------------------------------------------------------------------------
# scalar optimizer

def _golden_min(g, a: float, b: float, tol: float) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(200):
        if b - a <= tol:
            break
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    return (c, gc) if gc < gd else (d, gd)


def _refine(scalar_fn, phis, vals, minimize: bool, box, tol) -> tuple[float, float]:
    """Golden-section refinement around the best coarse-scan bracket."""
    sign = 1.0 if minimize else -1.0
    i = int(np.argmin(sign * vals))
    lo = phis[max(i - 1, 0)]
    hi = phis[min(i + 1, len(phis) - 1)]
    phi, val = _golden_min(lambda p: sign * scalar_fn(p), lo, hi, tol)
    val *= sign
    # keep the scan value if refinement could not improve on it (flat edges)
    if sign * vals[i] < sign * val:
        phi, val = float(phis[i]), float(vals[i])
    if i == 0 or i == len(phis) - 1:
        warnings.warn(
            f"dual optimum at the box edge phi={phi:.3f}; the box [-K, K] with "
            f"K={box[1]:g} is likely binding, rerun with a larger K",
            BoxBindingWarning,
            stacklevel=3,
        )
    return float(phi), float(val)


def optimize_scalar(objective, direction: str = "min",
                    box: tuple[float, float] = (-50.0, 50.0),
                    tolerance: float = 1e-8) -> tuple[float, float]:
    """Optimize a unimodal scalar objective over a box.

    Coarse scan on 257 equispaced points, then golden-section refinement of
    the bracketing interval. Warns when the optimum sits on the box edge.
    Returns ``(phi_star, value_star)``.
    """
    if direction not in ("min", "max"):
        raise ValueError("direction must be 'min' or 'max'")
    phis = np.linspace(box[0], box[1], _SCAN_POINTS)
    vals = np.array([objective(p) for p in phis])
    return _refine(objective, phis, vals, direction == "min", box, tolerance)


def _optimize_pair(vc, vm, w, e, side: str, K: float, tol: float) -> tuple[float, float]:
    """Fast path for the two dual objectives on pre-aligned arrays."""
    phis = np.linspace(-K, K, _SCAN_POINTS)
    if side == "upper":
        vals = _upper_values(phis, vc, vm, w, e)
        fn = lambda p: float(np.maximum(-p * vc, vm) @ w + p * e)
        return _refine(fn, phis, vals, True, (-K, K), tol)
    vals = _lower_values(phis, vc, vm, w, e)
    fn = lambda p: float(np.minimum(p * vc, vm) @ w - p * e)
    return _refine(fn, phis, vals, False, (-K, K), tol)


# ---------------------------------------------------------------------------
# bounds

@dataclass(frozen=True)
class CellBounds:
    """Per-cell bounds with the optimizing dual variables."""

    lb: float
    ub: float
    phi_lb: float
    phi_ub: float


@dataclass(frozen=True)
class BoundsResult:
    """Bounds on the average structural function, with diagnostics.

    ``per_z`` holds one ``(z, lb_z, ub_z)`` triple per covariate cell;
    ``z_lower``/``z_upper`` and ``phi_lower``/``phi_upper`` identify the
    optimizing cell and dual variable of each endpoint.
    """

    lower: float
    upper: float
    phi_lower: float
    phi_upper: float
    z_lower: int | None
    z_upper: int | None
    per_z: tuple

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "phi_lower": self.phi_lower,
            "phi_upper": self.phi_upper,
            "z_lower": self.z_lower,
            "z_upper": self.z_upper,
            "per_z": [{"z": z, "lb": lb, "ub": ub} for z, lb, ub in self.per_z],
        }


def bounds_given_z(cell: ThetaCell, config: AnalysisConfig | None = None) -> CellBounds:
    """Solve both dual programs for a single covariate cell."""
    config = config or AnalysisConfig()
    vc, vm, w = aligned_values(cell.f_cond, cell.f_marg)
    phi_lb, lb = _optimize_pair(vc, vm, w, cell.e, "lower", config.K, config.phi_tolerance)
    phi_ub, ub = _optimize_pair(vc, vm, w, cell.e, "upper", config.K, config.phi_tolerance)
    return CellBounds(lb=lb, ub=ub, phi_lb=phi_lb, phi_ub=phi_ub)


def bounds_with_exclusion(theta: ThetaEstimate,
                          config: AnalysisConfig | None = None) -> BoundsResult:
    """Tightest bounds across covariate cells: max of lowers, min of uppers.

    Ties between cells break toward the smaller ``z`` code, so the result
    is deterministic regardless of evaluation order.
    """
    config = config or AnalysisConfig()
    per_z = []
    z_sorted = sorted(theta.z_values, key=lambda z: (z is not None, z if z is not None else 0))
    for z in z_sorted:
        cb = bounds_given_z(theta.cell(z), config)
        per_z.append((z, cb))

    z_lo, best_lo = max(per_z, key=lambda t: t[1].lb - 0.0)
    z_hi, best_hi = min(per_z, key=lambda t: t[1].ub + 0.0)
    # explicit first-wins tie break toward the smaller z code
    for z, cb in per_z:
        if cb.lb == best_lo.lb:
            z_lo, best_lo = z, cb
            break
    for z, cb in per_z:
        if cb.ub == best_hi.ub:
            z_hi, best_hi = z, cb
            break

    lower, upper = best_lo.lb, best_hi.ub
    if lower > upper + config.phi_tolerance:
        warnings.warn(
            f"lower bound {lower:.6f} exceeds upper bound {upper:.6f}; the covariate "
            "cells are mutually inconsistent at this sample size",
            RuntimeWarning,
            stacklevel=2,
        )
    return BoundsResult(
        lower=lower,
        upper=upper,
        phi_lower=best_lo.phi_lb,
        phi_upper=best_hi.phi_ub,
        z_lower=z_lo,
        z_upper=z_hi,
        per_z=tuple((z, cb.lb, cb.ub) for z, cb in per_z),
    )


def _h_on_support(h, f: DensityFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate ``h`` on the grid/support of ``f``; returns (points, values, weights)."""
    if f.kind == "grid":
        if f.dim == 1:
            pts = f.axis()
            w = trapezoid_weights(f.m)
            vc = f.values
        else:
            ax = f.axis()
            g0, g1 = np.meshgrid(ax, ax, indexing="ij")
            pts = np.column_stack([g0.ravel(), g1.ravel()])
            w1 = trapezoid_weights(f.m)
            w = np.outer(w1, w1).ravel()
            vc = f.values.ravel()
    else:
        pts = f.points
        w = np.ones(f.masses.shape[0])
        vc = f.masses
    try:
        hv = np.asarray(h(pts), dtype=float)
        if hv.shape != (vc.shape[0],):
            raise ValueError
    except (ValueError, TypeError):
        hv = np.array([float(h(p)) for p in pts])
    return vc, hv, w


def moment_bounds_generic_h(h, f_P_given_x: DensityFunction, mean_d: float,
                            config: AnalysisConfig | None = None) -> tuple[float, float]:
    """Bounds on ``E[h(P) * m(X, P) | X = x]`` for a user-supplied weight ``h``.

    ``f_P_given_x`` is the conditional report density and ``mean_d`` the
    conditional mean of the decision. The two dual programs are

    * lower:  ``sup_phi  E[min(0, h(P) - phi) | X = x] + phi * mean_d``
    * upper:  ``inf_phi  E[max(0, h(P) + phi) | X = x] - phi * mean_d``

    Infinite values of ``h`` where the conditional density vanishes are
    harmless: those points carry zero weight in the expectations.
    """
    config = config or AnalysisConfig()
    if not 0.0 <= mean_d <= 1.0:
        raise ValueError(f"mean_d must lie in [0, 1], got {mean_d}")
    vc, hv, w = _h_on_support(h, f_P_given_x)
    # h * f_cond; points with zero conditional density carry zero
    # conditional probability, so 0 * inf resolves to 0 there
    with np.errstate(invalid="ignore"):
        hf = np.where(vc > 0, hv * vc, 0.0)
    K, tol = config.K, config.phi_tolerance

    phis = np.linspace(-K, K, _SCAN_POINTS)
    lo_vals = np.minimum(0.0, hf[None, :] - phis[:, None] * vc[None, :]) @ w + phis * mean_d
    lo_fn = lambda p: float(np.minimum(0.0, hf - p * vc) @ w + p * mean_d)
    _, lb = _refine(lo_fn, phis, lo_vals, False, (-K, K), tol)

    up_vals = np.maximum(0.0, hf[None, :] + phis[:, None] * vc[None, :]) @ w - phis * mean_d
    up_fn = lambda p: float(np.maximum(0.0, hf + p * vc) @ w - p * mean_d)
    _, ub = _refine(up_fn, phis, up_vals, True, (-K, K), tol)
    return lb, ub


def two_point_closed_form(mean_d: float, q_bar_cond: float,
                          q_bar_marg: float) -> tuple[float, float]:
    """Closed-form bounds when the reports take exactly two values.

    ``mean_d = E[D | X = x]``, ``q_bar_cond`` is the conditional and
    ``q_bar_marg`` the marginal probability of the upper support point.
    The two extreme couplings pin the pair of conditional choice
    probabilities at their clipped extremes; the bounds are returned as
    ``(min, max)`` of the two resulting values.
    """
    for name, v in (("mean_d", mean_d), ("q_bar_cond", q_bar_cond), ("q_bar_marg", q_bar_marg)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    if q_bar_cond in (0.0, 1.0):
        raise ValueError("degenerate conditional support: q_bar_cond must lie strictly in (0, 1)")

    q_low_cond = 1.0 - q_bar_cond
    psi_low_at_low = max(0.0, (mean_d - q_bar_cond) / q_low_cond)
    psi_high_at_high = min(1.0, mean_d / q_bar_cond)
    psi_high_at_low = min(1.0, mean_d / q_low_cond)
    psi_low_at_high = max(0.0, (mean_d - q_low_cond) / q_bar_cond)

    value_a = q_bar_marg * psi_low_at_high + (1.0 - q_bar_marg) * psi_high_at_low
    value_b = q_bar_marg * psi_high_at_high + (1.0 - q_bar_marg) * psi_low_at_low
    return (min(value_a, value_b), max(value_a, value_b))
