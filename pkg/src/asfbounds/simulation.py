"""Benchmark data-generating process, closed-form oracles, and the
Monte Carlo harness for the coverage study.

The benchmark is a binary retirement-style choice model. A scalar latent
type ``eta ~ N(0,1)`` drives everything: the potential decision at
attribute ``x`` is ``d(x) = 1{Phi((x+1) eta) >= nu}`` with ``nu`` uniform,
the probability report is ``p = 1 - Phi(eta)``, and the attribute at
decision and elicitation times are ``x = 1{Phi(eta) <= nu_x}`` and
``z = 1{Phi(eta) <= nu_z}`` with independent uniforms. Under this design
the report is uniform on [0, 1], the conditional report densities are the
polynomials ``3p^2``, ``6p(1-p)`` and ``3(1-p)^2`` depending on the
``(x, z)`` cell, and all conditional means have closed quadrature forms,
which makes every estimator in the package checkable against ground truth.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np
from joblib import Parallel, delayed
from numpy.polynomial.hermite import hermgauss
from scipy.special import ndtr, ndtri

from .bounds import BoundsResult, bounds_with_exclusion
from .config import AnalysisConfig, rng_stream
from .data import MatchedDataset
from .density import DensityFunction, grid_axis, trapezoid_integrate, trapezoid_weights
from .exceptions import EstimationError
from .inference import confidence_region
from .theta import ThetaCell, ThetaEstimate

__all__ = [
    "normal_cdf",
    "normal_quantile",
    "DgpDraw",
    "SimulationDraws",
    "simulate_draws",
    "simulate_sample",
    "true_asf",
    "analytic_theta",
    "analytic_bounds",
    "MonteCarloPlan",
    "MonteCarloCell",
    "MonteCarloReport",
    "run_monte_carlo",
]


def normal_cdf(t):
    """Standard normal distribution function (accurate to ~1e-15)."""
    return ndtr(t)


def normal_quantile(q):
    """Standard normal quantile function, the inverse of :func:`normal_cdf`."""
    return ndtri(q)


# ---------------------------------------------------------------------------
# data-generating process

@dataclass(frozen=True)
class DgpDraw:
    """One draw of the benchmark process, latent variables included."""

    eta: float
    nu: float
    nu_x: float
    nu_z: float
    d0: int
    d1: int
    p: float
    x: int
    z: int
    d: int


@dataclass(frozen=True)
class SimulationDraws:
    """Columnar draws of the benchmark process.

    ``matched``/``revealed_view``/``stated_view`` expose the observable
    fields; the latent columns stay available for oracle checks.
    """

    eta: np.ndarray
    nu: np.ndarray
    nu_x: np.ndarray
    nu_z: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    p: np.ndarray
    x: np.ndarray
    z: np.ndarray
    d: np.ndarray

    def __len__(self) -> int:
        return int(self.eta.shape[0])

    def draw(self, i: int) -> DgpDraw:
        return DgpDraw(
            eta=float(self.eta[i]), nu=float(self.nu[i]),
            nu_x=float(self.nu_x[i]), nu_z=float(self.nu_z[i]),
            d0=int(self.d0[i]), d1=int(self.d1[i]), p=float(self.p[i]),
            x=int(self.x[i]), z=int(self.z[i]), d=int(self.d[i]),
        )

    def matched(self) -> MatchedDataset:
        return MatchedDataset.from_arrays(d=self.d, p=self.p, x=self.x, z=self.z)


def simulate_draws(n: int, seed) -> SimulationDraws:
    """Draw ``n`` independent records; ``seed`` is an int or key tuple.

    The four underlying arrays are drawn in the fixed order ``eta, nu,
    nu_x, nu_z``, so a given seed reproduces the sample bit for bit.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    key = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
    rng = rng_stream(*key)
    eta = rng.standard_normal(n)
    nu = rng.uniform(size=n)
    nu_x = rng.uniform(size=n)
    nu_z = rng.uniform(size=n)

    u = ndtr(eta)
    p = 1.0 - u
    x = (u <= nu_x).astype(np.int64)
    z = (u <= nu_z).astype(np.int64)
    d0 = (u >= nu).astype(np.int64)
    d1 = (ndtr(2.0 * eta) >= nu).astype(np.int64)
    d = x * d1 + (1 - x) * d0
    return SimulationDraws(eta=eta, nu=nu, nu_x=nu_x, nu_z=nu_z,
                           d0=d0, d1=d1, p=p, x=x, z=z, d=d)


def simulate_sample(n: int, seed) -> MatchedDataset:
    """Matched benchmark sample; split it with ``revealed_view``/``stated_view``."""
    return simulate_draws(n, seed).matched()


# ---------------------------------------------------------------------------
# closed-form oracles

def _check_x(x: int) -> None:
    if x not in (0, 1):
        raise ValueError(f"x must be 0 or 1, got {x}")


def true_asf(x: int) -> float:
    """Average structural function by Gauss-Hermite quadrature.

    Equals 1/2 for both attribute values: the integrand pairs symmetrically
    under ``eta -> -eta``.
    """
    _check_x(x)
    nodes, weights = hermgauss(80)
    t = np.sqrt(2.0) * nodes
    return float(weights @ (1.0 - ndtr((x + 1) * t)) / np.sqrt(np.pi))


# conditional report densities per (x, z) cell, in the report variable p
_CELL_DENSITY = {
    (0, 0): lambda p: 3.0 * (1.0 - p) ** 2,
    (0, 1): lambda p: 6.0 * p * (1.0 - p),
    (1, 0): lambda p: 6.0 * p * (1.0 - p),
    (1, 1): lambda p: 3.0 * p ** 2,
}

_E_GRID = 200001  # quadrature grid for the conditional means


def _conditional_mean_complement_oracle(x: int, z: int) -> float:
    """Quadrature value of ``E[1 - D | X = x, Z = z]`` under the benchmark.

    In terms of ``u = Phi(eta)``, the cell density is proportional to
    ``u or (1-u)`` factors from the selection events, and
    ``P(1 - D(x) = 1 | u) = 1 - Phi((x+1) * Phi^{-1}(u))``.
    """
    u = grid_axis(_E_GRID)
    w_x = 1.0 - u if x == 1 else u
    w_z = 1.0 - u if z == 1 else u
    dens = w_x * w_z
    dens = dens / trapezoid_integrate(dens)
    with np.errstate(divide="ignore"):
        q = ndtri(u)
    survival = 1.0 - ndtr((x + 1) * q)
    return float(trapezoid_integrate(dens * survival))


def analytic_theta(x: int, config: AnalysisConfig | None = None) -> ThetaEstimate:
    """Exact nuisance parameter of the benchmark, tabulated on the grid.

    The report is marginally uniform; the cell densities are the known
    polynomials; the conditional means come from quadrature rather than
    hard-coded constants.
    """
    _check_x(x)
    config = config or AnalysisConfig()
    grid = grid_axis(config.M)
    f_marg = DensityFunction.from_grid(np.ones(config.M))
    cells = {}
    for z in (0, 1):
        values = _CELL_DENSITY[(x, z)](grid)
        values = values / trapezoid_integrate(values)
        cells[z] = ThetaCell(
            f_cond=DensityFunction.from_grid(values),
            f_marg=f_marg,
            e=_conditional_mean_complement_oracle(x, z),
        )
    return ThetaEstimate(x=x, f_marg=f_marg, cells=cells)


def analytic_bounds(x: int, config: AnalysisConfig | None = None) -> BoundsResult:
    """Bounds at the exact benchmark nuisance parameter."""
    return bounds_with_exclusion(analytic_theta(x, config), config)


# ---------------------------------------------------------------------------
# Monte Carlo harness

@dataclass(frozen=True)
class MonteCarloPlan:
    """Grid of the coverage study.

    ``split`` controls how the matched draws feed the unmatched pipeline:
    ``"shared"`` exposes the same rows through both observation windows
    (the default), ``"disjoint"`` sends the first half to the revealed
    sample and the second half to the stated sample.
    """

    n_values: tuple[int, ...] = (500,)
    xi_scales: tuple[float, ...] = (1.0,)
    repetitions: int = 200
    B: int = 200
    alpha: float = 0.05
    seed: int = 0
    x: int = 0
    split: str = "shared"

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.split not in ("shared", "disjoint"):
            raise ValueError("split must be 'shared' or 'disjoint'")
        _check_x(self.x)


@dataclass(frozen=True)
class MonteCarloCell:
    """One (n, xi_scale) cell of the study."""

    n: int
    xi_scale: float
    coverage: float | None
    excess_length: float | None
    repetitions: int
    B: int
    failures: int
    runtime_s: float


@dataclass(frozen=True)
class MonteCarloReport:
    """All cells, plus the oracle values they are scored against."""

    cells: tuple[MonteCarloCell, ...]
    true_value: float
    identified_lower: float
    identified_upper: float
    x: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "seed": self.seed,
            "true_value": self.true_value,
            "identified_lower": self.identified_lower,
            "identified_upper": self.identified_upper,
            "cells": [
                {
                    "n": c.n, "xi_scale": c.xi_scale, "coverage": c.coverage,
                    "excess_length": c.excess_length, "repetitions": c.repetitions,
                    "B": c.B, "failures": c.failures, "runtime_s": c.runtime_s,
                }
                for c in self.cells
            ],
        }

    def to_csv(self, path) -> None:
        """Write the coverage grid; wall-clock stays out so reruns are
        byte-identical."""

        def fmt(v):
            return "" if v is None else repr(float(v))

        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("n,xi_scale,coverage,excess_length,repetitions,B,failures\n")
            for c in self.cells:
                fh.write(
                    f"{c.n},{c.xi_scale!r},{fmt(c.coverage)},{fmt(c.excess_length)},"
                    f"{c.repetitions},{c.B},{c.failures}\n"
                )


def _mc_repetition(n: int, xi_scale: float, B: int, alpha: float, seed: int,
                   cell_index: int, rep: int, x: int, split: str,
                   base: AnalysisConfig) -> tuple[float, float] | None:
    """One repetition: simulate, split, run the region; None marks a failure."""
    draws = simulate_sample(n, (seed, cell_index, rep, 0))
    if split == "shared":
        revealed, stated = draws.revealed_view(), draws.stated_view()
    else:
        half = len(draws) // 2
        revealed = draws.take(np.arange(half)).revealed_view()
        stated = draws.take(np.arange(half, len(draws))).stated_view()
    rep_seed = int(rng_stream(seed, cell_index, rep, 1).integers(0, 2**62))
    config = AnalysisConfig(
        K=base.K, M=base.M, phi_tolerance=base.phi_tolerance, B=B, alpha=alpha,
        xi_scale=xi_scale, seed=rep_seed, boundary_correction=base.boundary_correction,
        z_drop_floor=base.z_drop_floor, workers=1,
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            region = confidence_region(revealed, stated, x, config)
    except EstimationError:
        return None
    return region.lo, region.hi


def run_monte_carlo(plan: MonteCarloPlan,
                    config: AnalysisConfig | None = None) -> MonteCarloReport:
    """Coverage and excess length of the region over the plan's grid.

    Coverage is the fraction of successful repetitions whose region covers
    the true value; excess length is the mean region length minus the
    length of the exact identified interval. Repetition ``rep`` of cell
    ``ci`` draws from streams keyed by ``(seed, ci, rep, .)``, so the
    report is reproducible for any worker count. Failed repetitions are
    counted, not fatal.
    """
    config = config or AnalysisConfig()
    truth = true_asf(plan.x)
    oracle = analytic_bounds(plan.x, config)
    id_len = oracle.upper - oracle.lower

    cells = []
    for ci, (n, xi) in enumerate(product(plan.n_values, plan.xi_scales)):
        t0 = time.perf_counter()
        results = Parallel(n_jobs=config.workers)(
            delayed(_mc_repetition)(
                n, xi, plan.B, plan.alpha, plan.seed, ci, rep, plan.x, plan.split, config
            )
            for rep in range(plan.repetitions)
        )
        ok = [r for r in results if r is not None]
        failures = plan.repetitions - len(ok)
        if ok:
            lows = np.array([r[0] for r in ok])
            highs = np.array([r[1] for r in ok])
            coverage = float(np.mean((lows <= truth) & (truth <= highs)))
            excess = float(np.mean(highs - lows) - id_len)
        else:
            coverage = None
            excess = None
        cells.append(MonteCarloCell(
            n=n, xi_scale=xi, coverage=coverage, excess_length=excess,
            repetitions=plan.repetitions, B=plan.B, failures=failures,
            runtime_s=time.perf_counter() - t0,
        ))
    return MonteCarloReport(
        cells=tuple(cells), true_value=truth,
        identified_lower=oracle.lower, identified_upper=oracle.upper,
        x=plan.x, seed=plan.seed,
    )
