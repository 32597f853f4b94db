"""Confidence regions for the bound pair from unmatched samples.

The plug-in bounds are min/max-type functionals of kernel density
estimates, hence directionally but not fully differentiable; the usual
bootstrap percentile method is invalid for them. Instead, each bootstrap
replicate perturbs the estimated densities along the resampled direction,
re-solves the dual programs, and finite-differences the optimal values
with step ``xi_n``. Quantiles of those derivative draws, scaled back by
the kernel convergence rate ``r_n = n**(2/5)``, shift the plug-in bounds
outward into a two-sided confidence region.

Conventions, applied verbatim: derivative draws are sorted in descending
order (order statistic 1 is the largest); the region is

``[lb_hat - phi_low^(ceil(B a/2)) / r_n,  ub_hat - phi_up^(floor(B(1-a/2))) / r_n]``

with 1-based order-statistic indices. The conditional means of ``1 - D``
are held fixed inside the derivative (they converge faster than the
densities), and bandwidths are frozen at their full-sample values across
replicates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .bounds import _optimize_pair, bounds_with_exclusion
from .config import AnalysisConfig, rng_stream
from .data import RevealedDataset, StatedDataset
from .density import DensityFunction, trapezoid_weights, union_atom_values
from .exceptions import (
    DiscreteSuggestionWarning,
    EmptyRegionWarning,
    EstimationError,
    SmallCellWarning,
)
from .kernels import count_density, fit_kernel_density, kde_fit
from .theta import ThetaCell, ThetaEstimate

__all__ = [
    "ConfidenceRegion",
    "estimate_theta",
    "bootstrap_theta",
    "numerical_derivative",
    "confidence_region",
]


# ---------------------------------------------------------------------------
# nuisance-parameter estimation

def _cell_or_none(dataset, x, z):
    try:
        return dataset.subsample(x) if z is None else dataset.subsample(x, z)
    except ValueError:
        return None


def estimate_theta(revealed: RevealedDataset, stated: StatedDataset, x: int,
                   config: AnalysisConfig | None = None,
                   discrete_p: bool = False) -> ThetaEstimate:
    """Estimate the density/mean triple for every usable covariate cell.

    The marginal report density is fitted on the full stated sample; each
    cell's conditional density on its stated subsample with its own
    rule-of-thumb bandwidth; each cell's mean of ``1 - D`` on its revealed
    subsample. Cells with fewer than ``config.z_drop_floor`` rows on either
    side are dropped with a warning.

    With ``discrete_p=True`` all densities are count densities. When the
    reports take at most 20 distinct values a warning suggests that mode.
    """
    config = config or AnalysisConfig()
    if x not in revealed.x_support or x not in stated.x_support:
        raise EstimationError(f"x={x} has no observations in both samples; no retained z")

    n_distinct = np.unique(stated.p, axis=0).shape[0]
    if not discrete_p and n_distinct <= 20:
        warnings.warn(
            f"the reports take only {n_distinct} distinct values; "
            "consider discrete_p=True (count densities)",
            DiscreteSuggestionWarning,
            stacklevel=2,
        )

    if revealed.has_z and stated.has_z:
        z_list = sorted(set(revealed.z_support) | set(stated.z_support))
    else:
        if revealed.has_z or stated.has_z:
            warnings.warn(
                "the excluded covariate is present in only one sample; ignoring it",
                UserWarning,
                stacklevel=2,
            )
        z_list = [None]

    if discrete_p:
        f_marg, marg_bw = count_density(stated.p), None
    else:
        fit = fit_kernel_density(stated.p, config.M, config.boundary_correction)
        f_marg, marg_bw = fit.density, fit.bandwidths

    cells: dict = {}
    for z in z_list:
        rev_sub = _cell_or_none(revealed, x, z)
        sta_sub = _cell_or_none(stated, x, z)
        n_rev = 0 if rev_sub is None else len(rev_sub)
        n_sta = 0 if sta_sub is None else len(sta_sub)
        if min(n_rev, n_sta) < config.z_drop_floor:
            warnings.warn(
                f"dropping cell z={z}: {n_sta} stated / {n_rev} revealed rows, "
                f"below the floor of {config.z_drop_floor}",
                SmallCellWarning,
                stacklevel=2,
            )
            continue
        e = float(np.mean(1.0 - rev_sub.d))
        if discrete_p:
            f_cond, bw = count_density(sta_sub.p), None
        else:
            fit = fit_kernel_density(sta_sub.p, config.M, config.boundary_correction)
            f_cond, bw = fit.density, fit.bandwidths
        cells[z] = ThetaCell(
            f_cond=f_cond, f_marg=f_marg, e=e,
            n_stated=n_sta, n_revealed=n_rev, bandwidths=bw,
        )

    if not cells:
        raise EstimationError("no retained z: every covariate cell fell below the floor")
    return ThetaEstimate(
        x=x, f_marg=f_marg, cells=cells,
        n_revealed=len(revealed), n_stated=len(stated), marg_bandwidths=marg_bw,
    )


def bootstrap_theta(revealed: RevealedDataset, stated: StatedDataset, x: int,
                    config: AnalysisConfig | None = None, replicate_index: int = 1,
                    theta_hat: ThetaEstimate | None = None) -> ThetaEstimate:
    """One bootstrap replicate of the nuisance parameter.

    The two samples are resampled independently, row by row, from a stream
    keyed by ``(config.seed, replicate_index)``. All kernel fits reuse the
    bandwidths of ``theta_hat``. A resample that empties a retained cell is
    discarded and redrawn (at most 100 attempts).
    """
    config = config or AnalysisConfig()
    if theta_hat is None:
        theta_hat = estimate_theta(revealed, stated, x, config)
    discrete = theta_hat.f_marg.kind == "atoms"
    rng = rng_stream(config.seed, replicate_index)

    for attempt in range(100):
        rev_b = revealed.take(rng.integers(0, len(revealed), size=len(revealed)))
        sta_b = stated.take(rng.integers(0, len(stated), size=len(stated)))
        subs = {}
        for z in theta_hat.z_values:
            rev_sub = _cell_or_none(rev_b, x, z)
            sta_sub = _cell_or_none(sta_b, x, z)
            if rev_sub is None or sta_sub is None or len(rev_sub) == 0 or len(sta_sub) == 0:
                subs = None
                break
            subs[z] = (rev_sub, sta_sub)
        if subs is None:
            warnings.warn(
                f"replicate {replicate_index}: resample emptied cell z={z} "
                f"(attempt {attempt + 1}), redrawing",
                UserWarning,
                stacklevel=2,
            )
            continue

        if discrete:
            f_marg = count_density(sta_b.p)
        else:
            f_marg = kde_fit(sta_b.p, theta_hat.marg_bandwidths, config.M,
                             config.boundary_correction)
        cells = {}
        for z, (rev_sub, sta_sub) in subs.items():
            hat_cell = theta_hat.cell(z)
            if discrete:
                f_cond = count_density(sta_sub.p)
            else:
                f_cond = kde_fit(sta_sub.p, hat_cell.bandwidths, config.M,
                                 config.boundary_correction)
            cells[z] = ThetaCell(
                f_cond=f_cond, f_marg=f_marg, e=float(np.mean(1.0 - rev_sub.d)),
                n_stated=len(sta_sub), n_revealed=len(rev_sub),
                bandwidths=hat_cell.bandwidths,
            )
        return ThetaEstimate(
            x=x, f_marg=f_marg, cells=cells,
            n_revealed=len(rev_b), n_stated=len(sta_b),
            marg_bandwidths=theta_hat.marg_bandwidths,
        )

    raise EstimationError(
        "bootstrap resampling emptied a retained covariate cell in 100 consecutive draws"
    )


# ---------------------------------------------------------------------------
# numerical directional derivative

def _aligned_four(cond_hat: DensityFunction, marg_hat: DensityFunction,
                  cond_star: DensityFunction, marg_star: DensityFunction):
    """Common value arrays and weights for a hat/star density quadruple."""
    kinds = {d.kind for d in (cond_hat, marg_hat, cond_star, marg_star)}
    if len(kinds) != 1:
        raise ValueError("hat and star densities have mismatched representations")
    if cond_hat.kind == "grid":
        shapes = {d.values.shape for d in (cond_hat, marg_hat, cond_star, marg_star)}
        if len(shapes) != 1:
            raise ValueError("hat and star densities are tabulated on different grids")
        w = trapezoid_weights(cond_hat.values.shape[0])
        if cond_hat.dim == 2:
            w = np.outer(w, w).ravel()
        return (cond_hat.values.ravel(), marg_hat.values.ravel(),
                cond_star.values.ravel(), marg_star.values.ravel(), w)
    _, vals = union_atom_values([cond_hat, marg_hat, cond_star, marg_star])
    return (*vals, np.ones_like(vals[0]))


def _perturbed_program(theta_hat: ThetaEstimate, theta_star: ThetaEstimate,
                       side: str, scale: float, config: AnalysisConfig) -> float:
    """Optimal value of the dual program at the perturbed densities.

    Both density components move by ``scale * (star - hat)``; the
    conditional means stay at their full-sample values. Negative perturbed
    values are admitted as-is, the objectives remain well defined.
    """
    best = None
    for z in theta_hat.z_values:
        hat_cell = theta_hat.cell(z)
        star_cell = theta_star.cell(z)
        vch, vmh, vcs, vms, w = _aligned_four(
            hat_cell.f_cond, theta_hat.f_marg, star_cell.f_cond, theta_star.f_marg
        )
        pc = vch + scale * (vcs - vch)
        pm = vmh + scale * (vms - vmh)
        _, val = _optimize_pair(pc, pm, w, hat_cell.e, side,
                                config.K, config.phi_tolerance)
        if best is None:
            best = val
        else:
            best = min(best, val) if side == "upper" else max(best, val)
    return best


def numerical_derivative(theta_hat: ThetaEstimate, theta_star: ThetaEstimate,
                         side: str, xi_n: float, r_n: float,
                         config: AnalysisConfig | None = None,
                         base_value: float | None = None) -> float:
    """Finite-difference directional derivative of one bound functional.

    Evaluates the program at densities perturbed by ``xi_n * r_n *
    (theta_star - theta_hat)``, subtracts the unperturbed optimum, and
    divides by ``xi_n``. ``base_value`` short-circuits the unperturbed solve
    when the caller already holds it.
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    if xi_n <= 0 or r_n <= 0:
        raise ValueError("xi_n and r_n must be positive")
    config = config or AnalysisConfig()
    if set(theta_star.z_values) != set(theta_hat.z_values):
        raise ValueError("theta_star must carry the same covariate cells as theta_hat")
    perturbed = _perturbed_program(theta_hat, theta_star, side, xi_n * r_n, config)
    if base_value is None:
        base_value = _perturbed_program(theta_hat, theta_hat, side, 0.0, config)
    return (perturbed - base_value) / xi_n


# ---------------------------------------------------------------------------
# confidence region

@dataclass(frozen=True)
class ConfidenceRegion:
    """Two-sided region for the bound pair, with its derivative draws.

    ``lower_draws``/``upper_draws`` keep all ``B`` derivative evaluations
    for diagnostics; the region endpoints are reproducible from them via
    the order-statistic formula in the module docstring.
    """

    x: int
    lb_hat: float
    ub_hat: float
    lo: float
    hi: float
    alpha: float
    B: int
    r_n: float
    xi_n: float
    lower_draws: np.ndarray
    upper_draws: np.ndarray
    warnings: tuple[str, ...] = ()
    is_empty: bool = False

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "lb_hat": self.lb_hat,
            "ub_hat": self.ub_hat,
            "lo": self.lo,
            "hi": self.hi,
            "alpha": self.alpha,
            "B": self.B,
            "r_n": self.r_n,
            "xi_n": self.xi_n,
            "is_empty": self.is_empty,
            "warnings": list(self.warnings),
        }

    def draws_to_csv(self, path) -> None:
        """Dump the derivative draws, one row per replicate."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("replicate,lower_derivative,upper_derivative\n")
            for b, (lo_d, up_d) in enumerate(zip(self.lower_draws, self.upper_draws), start=1):
                fh.write(f"{b},{lo_d!r},{up_d!r}\n")


def _derivative_replicate(revealed, stated, x, config, b, theta_hat,
                          xi_n, r_n, lb_hat, ub_hat) -> tuple[float, float]:
    theta_star = bootstrap_theta(revealed, stated, x, config, b, theta_hat)
    low = numerical_derivative(theta_hat, theta_star, "lower", xi_n, r_n, config,
                               base_value=lb_hat)
    up = numerical_derivative(theta_hat, theta_star, "upper", xi_n, r_n, config,
                              base_value=ub_hat)
    return low, up


def confidence_region(revealed: RevealedDataset, stated: StatedDataset, x: int,
                      config: AnalysisConfig | None = None,
                      discrete_p: bool = False) -> ConfidenceRegion:
    """Bootstrap confidence region for the identified interval at ``x``.

    ``r_n = n**(2/5)`` and ``xi_n = xi_scale * n**(-3/10)`` with ``n`` the
    smaller of the two sample sizes. Replicate ``b`` derives its resampling
    stream from ``(config.seed, b)``, so the region is a deterministic
    function of ``(seed, B, data, config)`` for any worker count.
    """
    config = config or AnalysisConfig()
    if config.B < 20:
        raise ValueError(f"confidence regions need B >= 20 replications, got {config.B}")

    recorded: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        theta_hat = estimate_theta(revealed, stated, x, config, discrete_p)
        plug_in = bounds_with_exclusion(theta_hat, config)
    for item in caught:
        recorded.append(str(item.message))
        warnings.warn_explicit(item.message, item.category, item.filename, item.lineno)

    lb_hat, ub_hat = plug_in.lower, plug_in.upper
    n = min(len(revealed), len(stated))
    r_n = n ** 0.4
    xi_n = config.xi_scale * n ** (-0.3)

    pairs = Parallel(n_jobs=config.workers)(
        delayed(_derivative_replicate)(
            revealed, stated, x, config, b, theta_hat, xi_n, r_n, lb_hat, ub_hat
        )
        for b in range(1, config.B + 1)
    )
    lower_draws = np.array([p[0] for p in pairs])
    upper_draws = np.array([p[1] for p in pairs])

    low_desc = np.sort(lower_draws)[::-1]
    up_desc = np.sort(upper_draws)[::-1]
    i_low = min(max(math.ceil(config.B * config.alpha / 2), 1), config.B)
    i_up = min(max(math.floor(config.B * (1 - config.alpha / 2)), 1), config.B)
    lo = lb_hat - low_desc[i_low - 1] / r_n
    hi = ub_hat - up_desc[i_up - 1] / r_n

    is_empty = lo > hi
    if is_empty:
        msg = (
            f"empty confidence region: lo={lo:.6f} > hi={hi:.6f}; "
            "sampling noise dominates at this sample size"
        )
        recorded.append(msg)
        warnings.warn(msg, EmptyRegionWarning, stacklevel=2)

    return ConfidenceRegion(
        x=x, lb_hat=lb_hat, ub_hat=ub_hat, lo=float(lo), hi=float(hi),
        alpha=config.alpha, B=config.B, r_n=float(r_n), xi_n=float(xi_n),
        lower_draws=lower_draws, upper_draws=upper_draws,
        warnings=tuple(recorded), is_empty=bool(is_empty),
    )
