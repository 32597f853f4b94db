"""Containers for the estimated nuisance parameter of the bound formulas.

For a fixed attribute value ``x``, each excluded-covariate value ``z``
contributes a triple: the conditional density of the reports given
``(X, Z) = (x, z)``, the marginal density of the reports, and the
conditional mean ``E[1 - D | X = x, Z = z]``. The marginal density is
shared across cells.
"""

from __future__ import annotations

from dataclasses import dataclass

from .density import DensityFunction

__all__ = ["ThetaCell", "ThetaEstimate"]


@dataclass(frozen=True)
class ThetaCell:
    """One covariate cell: conditional density, shared marginal, mean of 1 - D.

    ``bandwidths`` records the kernel bandwidths of the conditional fit
    (``None`` for atom-backed densities) so bootstrap refits can reuse them.
    ``n_stated``/``n_revealed`` are the cell sizes in the two samples; zero
    marks analytically constructed cells.
    """

    f_cond: DensityFunction
    f_marg: DensityFunction
    e: float
    n_stated: int = 0
    n_revealed: int = 0
    bandwidths: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0.0 <= self.e <= 1.0:
            raise ValueError(f"conditional mean must lie in [0, 1], got {self.e}")


@dataclass(frozen=True)
class ThetaEstimate:
    """All cells for one ``x``, keyed by ``z`` (a single ``None`` key when
    no excluded covariate is available)."""

    x: int
    f_marg: DensityFunction
    cells: dict
    n_revealed: int = 0
    n_stated: int = 0
    marg_bandwidths: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.cells:
            raise ValueError("theta estimate needs at least one covariate cell")

    @property
    def z_values(self) -> tuple:
        return tuple(self.cells.keys())

    def cell(self, z) -> ThetaCell:
        return self.cells[z]
