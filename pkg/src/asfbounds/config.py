"""Analysis configuration and deterministic random-number streams."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

_BOUNDARY_MODES = ("none", "reflection")


@dataclass(frozen=True)
class AnalysisConfig:
    """Tuning knobs shared by the estimators.

    Attributes
    ----------
    K : float
        Half-width of the search box for the dual variable.
    M : int
        Grid points per axis for grid-backed densities; must be odd.
    phi_tolerance : float
        Convergence tolerance of the one-dimensional optimizer.
    B : int
        Bootstrap replications.
    alpha : float
        Significance level of confidence regions.
    xi_scale : float
        Constant ``c`` in the step size ``xi_n = c * n**(-3/10)`` of the
        numerical directional derivative.
    seed : int
        Master seed; every random task derives its own stream from it.
    boundary_correction : str
        ``"none"`` (default) or ``"reflection"`` for kernel fits near the
        edges of the unit interval.
    z_drop_floor : int
        Minimum observations per covariate cell; smaller cells are dropped
        with a warning.
    workers : int
        Worker processes for bootstrap replicates and simulation repetitions.
        Results are independent of this value.
    """

    K: float = 50.0
    M: int = 1001
    phi_tolerance: float = 1e-8
    B: int = 1000
    alpha: float = 0.05
    xi_scale: float = 1.0
    seed: int = 0
    boundary_correction: str = "none"
    z_drop_floor: int = 20
    workers: int = 1

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.M < 3 or self.M % 2 == 0:
            raise ValueError(f"M must be an odd integer >= 3, got {self.M}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.B < 1:
            raise ValueError(f"B must be >= 1, got {self.B}")
        if not self.phi_tolerance > 0:
            raise ValueError("phi_tolerance must be positive")
        if not self.xi_scale > 0:
            raise ValueError("xi_scale must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.boundary_correction not in _BOUNDARY_MODES:
            raise ValueError(
                f"boundary_correction must be one of {_BOUNDARY_MODES}, "
                f"got {self.boundary_correction!r}"
            )
        if self.z_drop_floor < 1:
            raise ValueError("z_drop_floor must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def rng_stream(*key: int) -> np.random.Generator:
    """Return a generator keyed by an integer tuple.

    Streams for distinct keys are statistically independent, and the stream
    for a given key does not depend on scheduling or worker count.
    """
    if any(int(k) < 0 for k in key):
        raise ValueError(f"stream key parts must be nonnegative, got {key}")
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))
