"""Densities on the unit interval or unit square.

A :class:`DensityFunction` is either grid-backed (values tabulated on a
uniform grid with ``M`` points per axis, integrated by the trapezoid rule)
or atom-backed (support points with probability masses, integrated by exact
summation). Both kinds enter the bound formulas on the same footing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DensityFunction", "trapezoid_weights", "trapezoid_integrate", "grid_axis"]


def grid_axis(m: int) -> np.ndarray:
    """Uniform grid with ``m`` points spanning [0, 1]."""
    return np.linspace(0.0, 1.0, m)


def trapezoid_weights(m: int) -> np.ndarray:
    """Trapezoid quadrature weights for the uniform grid on [0, 1]."""
    if m < 2:
        raise ValueError(f"need at least two grid points, got {m}")
    w = np.full(m, 1.0 / (m - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def trapezoid_integrate(values: np.ndarray, dim: int | None = None) -> float:
    """Trapezoid rule on the unit grid, tensorized for two dimensions.

    ``values`` has shape ``(M,)`` for dim 1 or ``(M, M)`` for dim 2; ``dim``
    is inferred from the shape when omitted.
    """
    values = np.asarray(values, dtype=float)
    if dim is None:
        dim = values.ndim
    if dim == 1:
        return float(values @ trapezoid_weights(values.shape[0]))
    if dim == 2:
        w0 = trapezoid_weights(values.shape[0])
        w1 = trapezoid_weights(values.shape[1])
        return float(w0 @ values @ w1)
    raise ValueError(f"only dim 1 or 2 is supported, got {dim}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityFunction:
    """A density, grid-backed (``kind="grid"``) or atom-backed (``kind="atoms"``).

    Grid kind: ``values`` holds nonnegative density values on the uniform
    grid over [0, 1]^dim with ``M`` points per axis. Atom kind: ``points``
    holds the support and ``masses`` the probabilities.
    """

    kind: str
    values: np.ndarray | None = None
    points: np.ndarray | None = None
    masses: np.ndarray | None = None

    @classmethod
    def from_grid(
        cls, values: np.ndarray, *, normalization_tol: float | None = 1e-6
    ) -> "DensityFunction":
        """Build a grid density; checks nonnegativity and, unless disabled,
        that the trapezoid integral equals one within ``normalization_tol``."""
        values = np.asarray(values, dtype=float)
        if values.ndim not in (1, 2):
            raise ValueError("grid values must be one- or two-dimensional")
        if values.ndim == 2 and values.shape[0] != values.shape[1]:
            raise ValueError("two-dimensional grids must be square")
        if values.shape[0] < 2:
            raise ValueError("grid needs at least two points per axis")
        if np.any(values < 0):
            raise ValueError("density values must be nonnegative")
        if normalization_tol is not None:
            total = trapezoid_integrate(values)
            if abs(total - 1.0) > normalization_tol:
                raise ValueError(
                    f"grid density integrates to {total:.8f}, "
                    f"outside 1 +/- {normalization_tol:g}"
                )
        return cls(kind="grid", values=_readonly(values))

    @classmethod
    def from_atoms(
        cls, points: np.ndarray, masses: np.ndarray, *, mass_tol: float = 1e-12
    ) -> "DensityFunction":
        """Build an atom density; masses must be nonnegative and sum to one."""
        points = np.asarray(points, dtype=float)
        masses = np.asarray(masses, dtype=float)
        if points.ndim not in (1, 2):
            raise ValueError("atom points must be one- or two-dimensional")
        if points.shape[0] != masses.shape[0]:
            raise ValueError("points and masses must have matching lengths")
        if points.shape[0] == 0:
            raise ValueError("atom density needs at least one support point")
        if np.any(masses < 0):
            raise ValueError("atom masses must be nonnegative")
        if abs(float(masses.sum()) - 1.0) > mass_tol:
            raise ValueError(
                f"atom masses sum to {float(masses.sum()):.15f}, "
                f"outside 1 +/- {mass_tol:g}"
            )
        return cls(kind="atoms", points=_readonly(points), masses=_readonly(masses))

    @property
    def dim(self) -> int:
        if self.kind == "grid":
            return self.values.ndim
        return 1 if self.points.ndim == 1 else self.points.shape[1]

    @property
    def m(self) -> int:
        """Grid points per axis (grid kind only)."""
        if self.kind != "grid":
            raise ValueError("m is only defined for grid densities")
        return self.values.shape[0]

    def axis(self) -> np.ndarray:
        if self.kind != "grid":
            raise ValueError("axis is only defined for grid densities")
        return grid_axis(self.m)

    def integral(self) -> float:
        """Total mass: trapezoid rule for grids, exact sum for atoms."""
        if self.kind == "grid":
            return trapezoid_integrate(self.values)
        return float(self.masses.sum())

    def evaluate(self, q) -> np.ndarray:
        """Evaluate at arbitrary points by linear interpolation (grid kind).

        ``q`` has shape ``(k,)`` for dim 1 or ``(k, 2)`` for dim 2.
        """
        if self.kind != "grid":
            raise ValueError("pointwise evaluation is only defined for grid densities")
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if self.dim == 1:
            return np.interp(q, self.axis(), self.values)
        if q.ndim == 1:
            q = q.reshape(1, -1)
        return _bilinear(self.values, q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityFunction) or self.kind != other.kind:
            return NotImplemented if not isinstance(other, DensityFunction) else False
        if self.kind == "grid":
            return self.values.shape == other.values.shape and bool(
                np.array_equal(self.values, other.values)
            )
        return bool(
            np.array_equal(self.points, other.points)
            and np.array_equal(self.masses, other.masses)
        )


def _bilinear(values: np.ndarray, q: np.ndarray) -> np.ndarray:
    m = values.shape[0]
    step = 1.0 / (m - 1)
    idx = np.clip((q / step).astype(int), 0, m - 2)
    frac = q / step - idx
    i0, j0 = idx[:, 0], idx[:, 1]
    fx, fy = frac[:, 0], frac[:, 1]
    v00 = values[i0, j0]
    v10 = values[i0 + 1, j0]
    v01 = values[i0, j0 + 1]
    v11 = values[i0 + 1, j0 + 1]
    return (
        v00 * (1 - fx) * (1 - fy)
        + v10 * fx * (1 - fy)
        + v01 * (1 - fx) * fy
        + v11 * fx * fy
    )


def union_atom_values(densities: list[DensityFunction]) -> tuple[np.ndarray, list[np.ndarray]]:
    """Align atom densities on the union of their supports.

    Returns the union support and, for each input, its masses extended with
    zeros on points it does not carry.
    """
    if any(d.kind != "atoms" for d in densities):
        raise ValueError("union alignment is only defined for atom densities")
    dim = densities[0].dim
    if any(d.dim != dim for d in densities):
        raise ValueError("atom densities have mismatched dimensions")

    def keys(d: DensityFunction):
        if dim == 1:
            return [(float(p),) for p in d.points]
        return [tuple(map(float, p)) for p in d.points]

    support = sorted({k for d in densities for k in keys(d)})
    index = {k: i for i, k in enumerate(support)}
    aligned = []
    for d in densities:
        v = np.zeros(len(support))
        for k, mass in zip(keys(d), d.masses):
            v[index[k]] += mass
        aligned.append(v)
    pts = np.array([k[0] for k in support]) if dim == 1 else np.array(support)
    return pts, aligned
