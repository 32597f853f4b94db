"""Observation types, dataset containers, CSV ingestion and subsampling.

Datasets are immutable, columnar wrappers around numpy arrays. Loaders
validate every record and raise :class:`DataValidationError` carrying
1-based data-row indices for all offending rows; a loaded dataset is
guaranteed to satisfy the type invariants.

CSV layout (UTF-8, header row, decimal point):

* revealed data: ``d`` (0/1 integer), ``x`` (integer code), optional ``z``;
* stated data: ``p1`` and optionally ``p2`` (floats in [0, 1]), ``x``,
  optional ``z``;
* matched data: union of the two layouts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DataValidationError

__all__ = [
    "RevealedObservation",
    "StatedObservation",
    "MatchedObservation",
    "RevealedDataset",
    "StatedDataset",
    "MatchedDataset",
    "load_revealed_csv",
    "load_stated_csv",
    "load_matched_csv",
    "subsample",
]


@dataclass(frozen=True)
class RevealedObservation:
    """One actual-choice record: decision ``d``, attribute ``x``, optional ``z``."""

    d: int
    x: int
    z: int | None = None

    def __post_init__(self):
        if self.d not in (0, 1):
            raise ValueError(f"d must be 0 or 1, got {self.d}")


@dataclass(frozen=True)
class StatedObservation:
    """One survey record: reported probabilities ``p``, attribute ``x``, optional ``z``."""

    p: tuple[float, ...]
    x: int
    z: int | None = None

    def __post_init__(self):
        if len(self.p) not in (1, 2):
            raise ValueError("p must have one or two coordinates")
        if any(not 0.0 <= v <= 1.0 for v in self.p):
            raise ValueError(f"every coordinate of p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class MatchedObservation:
    """Decision and stated probabilities observed for the same individual."""

    d: int
    p: tuple[float, ...]
    x: int
    z: int | None = None

    def __post_init__(self):
        RevealedObservation(self.d, self.x, self.z)
        StatedObservation(self.p, self.x, self.z)


def _support(a: np.ndarray | None) -> tuple[int, ...] | None:
    if a is None:
        return None
    return tuple(int(v) for v in np.unique(a))


def _mask(x_arr, z_arr, x, z, z_given):
    if x not in _support(x_arr):
        raise ValueError(f"x={x} is not in the declared support {_support(x_arr)}")
    mask = x_arr == x
    if z_given:
        if z_arr is None:
            raise ValueError("z not present in this dataset")
        if z not in _support(z_arr):
            raise ValueError(f"z={z} is not in the declared support {_support(z_arr)}")
        mask = mask & (z_arr == z)
    return mask


_UNSET = object()


class _BaseDataset:
    def __len__(self) -> int:
        return int(self.x.shape[0])

    @property
    def x_support(self) -> tuple[int, ...]:
        return _support(self.x)

    @property
    def z_support(self) -> tuple[int, ...] | None:
        return _support(self.z)

    @property
    def has_z(self) -> bool:
        return self.z is not None

    def subsample(self, x: int, z=_UNSET):
        """Records with ``X == x`` (and ``Z == z`` when given), order preserved."""
        mask = _mask(self.x, self.z, x, None if z is _UNSET else z, z is not _UNSET)
        return self.take(np.nonzero(mask)[0])

    def validation_report(self) -> dict:
        rep = {
            "kind": type(self).__name__,
            "n": len(self),
            "x_support": list(self.x_support),
            "z_support": list(self.z_support) if self.has_z else None,
        }
        if hasattr(self, "p"):
            rep["dim_p"] = self.dim_p
        return rep


def _frozen(a, dtype):
    out = np.asarray(a, dtype=dtype).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RevealedDataset(_BaseDataset):
    """Columnar container of :class:`RevealedObservation` records."""

    d: np.ndarray
    x: np.ndarray
    z: np.ndarray | None = None

    @classmethod
    def from_arrays(cls, d, x, z=None) -> "RevealedDataset":
        d = _frozen(d, np.int64)
        if d.size == 0:
            raise DataValidationError("empty dataset")
        if np.any((d != 0) & (d != 1)):
            bad = int(np.nonzero((d != 0) & (d != 1))[0][0]) + 1
            raise DataValidationError(f"d outside {{0,1}} at row {bad}", [(bad, "d outside {0,1}")])
        return cls(d=d, x=_frozen(x, np.int64), z=None if z is None else _frozen(z, np.int64))

    def take(self, idx) -> "RevealedDataset":
        return RevealedDataset(
            d=_frozen(self.d[idx], np.int64),
            x=_frozen(self.x[idx], np.int64),
            z=None if self.z is None else _frozen(self.z[idx], np.int64),
        )

    def records(self):
        for i in range(len(self)):
            yield RevealedObservation(
                int(self.d[i]), int(self.x[i]), None if self.z is None else int(self.z[i])
            )

    def to_csv(self, path) -> None:
        header = ["d", "x"] + (["z"] if self.has_z else [])
        rows = (
            [str(int(self.d[i])), str(int(self.x[i]))]
            + ([str(int(self.z[i]))] if self.has_z else [])
            for i in range(len(self))
        )
        _write_csv(path, header, rows)


@dataclass(frozen=True, eq=False)
class StatedDataset(_BaseDataset):
    """Columnar container of :class:`StatedObservation` records; ``p`` has shape (n, dim_p)."""

    p: np.ndarray
    x: np.ndarray
    z: np.ndarray | None = None

    @classmethod
    def from_arrays(cls, p, x, z=None) -> "StatedDataset":
        p = np.asarray(p, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.size == 0:
            raise DataValidationError("empty dataset")
        if p.shape[1] not in (1, 2):
            raise DataValidationError("p must have one or two coordinates per record")
        bad = np.nonzero(np.any((p < 0) | (p > 1), axis=1))[0]
        if bad.size:
            row = int(bad[0]) + 1
            raise DataValidationError(
                f"p outside [0,1] at row {row}", [(int(b) + 1, "p outside [0,1]") for b in bad]
            )
        return cls(p=_frozen(p, float), x=_frozen(x, np.int64),
                   z=None if z is None else _frozen(z, np.int64))

    @property
    def dim_p(self) -> int:
        return int(self.p.shape[1])

    def take(self, idx) -> "StatedDataset":
        return StatedDataset(
            p=_frozen(self.p[idx], float),
            x=_frozen(self.x[idx], np.int64),
            z=None if self.z is None else _frozen(self.z[idx], np.int64),
        )

    def records(self):
        for i in range(len(self)):
            yield StatedObservation(
                tuple(float(v) for v in self.p[i]),
                int(self.x[i]),
                None if self.z is None else int(self.z[i]),
            )

    def to_csv(self, path) -> None:
        header = [f"p{a + 1}" for a in range(self.dim_p)] + ["x"] + (["z"] if self.has_z else [])
        rows = (
            [repr(float(v)) for v in self.p[i]]
            + [str(int(self.x[i]))]
            + ([str(int(self.z[i]))] if self.has_z else [])
            for i in range(len(self))
        )
        _write_csv(path, header, rows)


@dataclass(frozen=True, eq=False)
class MatchedDataset(_BaseDataset):
    """Decisions and stated probabilities for the same individuals, row by row."""

    d: np.ndarray
    p: np.ndarray
    x: np.ndarray
    z: np.ndarray | None = None

    @classmethod
    def from_arrays(cls, d, p, x, z=None) -> "MatchedDataset":
        rev = RevealedDataset.from_arrays(d, x, z)
        sta = StatedDataset.from_arrays(p, x, z)
        if len(rev) != len(sta):
            raise DataValidationError("d and p columns have different lengths")
        return cls(d=rev.d, p=sta.p, x=sta.x, z=sta.z)

    @property
    def dim_p(self) -> int:
        return int(self.p.shape[1])

    def take(self, idx) -> "MatchedDataset":
        return MatchedDataset(
            d=_frozen(self.d[idx], np.int64),
            p=_frozen(self.p[idx], float),
            x=_frozen(self.x[idx], np.int64),
            z=None if self.z is None else _frozen(self.z[idx], np.int64),
        )

    def revealed_view(self) -> RevealedDataset:
        """The (d, x, z) columns as a revealed-preference dataset (same rows)."""
        return RevealedDataset(d=self.d, x=self.x, z=self.z)

    def stated_view(self) -> StatedDataset:
        """The (p, x, z) columns as a stated-preference dataset (same rows)."""
        return StatedDataset(p=self.p, x=self.x, z=self.z)

    def records(self):
        for i in range(len(self)):
            yield MatchedObservation(
                int(self.d[i]),
                tuple(float(v) for v in self.p[i]),
                int(self.x[i]),
                None if self.z is None else int(self.z[i]),
            )

    def to_csv(self, path) -> None:
        header = (
            ["d"]
            + [f"p{a + 1}" for a in range(self.dim_p)]
            + ["x"]
            + (["z"] if self.has_z else [])
        )
        rows = (
            [str(int(self.d[i]))]
            + [repr(float(v)) for v in self.p[i]]
            + [str(int(self.x[i]))]
            + ([str(int(self.z[i]))] if self.has_z else [])
            for i in range(len(self))
        )
        _write_csv(path, header, rows)


def subsample(dataset, x: int, z=_UNSET):
    """Restrict a dataset to ``X == x`` (and ``Z == z`` when given)."""
    if z is _UNSET:
        return dataset.subsample(x)
    return dataset.subsample(x, z)


# ---------------------------------------------------------------------------
# CSV ingestion


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError(f"malformed file (no header): {path}") from None
        rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    return [h.strip() for h in header], rows


def _parse_int(cell: str, name: str, allowed=None):
    try:
        v = int(cell)
    except ValueError:
        raise ValueError(f"{name} is not an integer: {cell!r}") from None
    if allowed is not None and v not in allowed:
        raise ValueError(f"{name} outside {set(allowed)}: {cell!r}")
    return v


def _parse_prob(cell: str, name: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ValueError(f"{name} is not a number: {cell!r}") from None
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} outside [0,1]: {cell!r}")
    return v


def _load_table(path, schema: dict[str, object] | None, *, want_d: bool, want_p: bool):
    """Shared loader core: resolve columns, validate and collect every row."""
    schema = schema or {}
    header, rows = _read_rows(path)
    col = {name: header.index(name) for name in header}

    d_col = schema.get("d", "d")
    x_col = schema.get("x", "x")
    z_col = schema.get("z", "z")
    p_cols = schema.get("p")
    if p_cols is None:
        p_cols = [c for c in ("p1", "p2") if c in col]

    required = [x_col] + ([d_col] if want_d else []) + (list(p_cols) if want_p else [])
    missing = [c for c in required if c not in col]
    if missing or (want_p and not p_cols):
        raise DataValidationError(
            f"malformed file: missing required column(s) {missing or ['p1']} in {path}"
        )
    has_z = z_col in col

    d_vals, p_vals, x_vals, z_vals = [], [], [], []
    errors: list[tuple[int, str]] = []
    for i, row in enumerate(rows, start=1):
        try:
            if len(row) != len(header):
                raise ValueError(f"expected {len(header)} fields, found {len(row)}")
            if any(row[col[c]].strip() == "" for c in required + ([z_col] if has_z else [])):
                raise ValueError("missing field")
            if want_d:
                d_vals.append(_parse_int(row[col[d_col]], "d", allowed=(0, 1)))
            if want_p:
                p_vals.append([_parse_prob(row[col[c]], c) for c in p_cols])
            x_vals.append(_parse_int(row[col[x_col]], "x"))
            if has_z:
                z_vals.append(_parse_int(row[col[z_col]], "z"))
        except ValueError as exc:
            errors.append((i, str(exc)))

    if errors:
        first_row, first_msg = errors[0]
        raise DataValidationError(
            f"{len(errors)} invalid record(s); first at row {first_row}: {first_msg}",
            errors,
        )
    if not x_vals:
        raise DataValidationError(f"empty dataset: {path}")
    return d_vals, p_vals, x_vals, (z_vals if has_z else None)


def load_revealed_csv(path, schema: dict[str, object] | None = None) -> RevealedDataset:
    """Load actual-choice records; see the module docstring for the layout."""
    d, _, x, z = _load_table(path, schema, want_d=True, want_p=False)
    return RevealedDataset.from_arrays(d, x, z)


def load_stated_csv(path, schema: dict[str, object] | None = None) -> StatedDataset:
    """Load survey records with one or two probability columns."""
    _, p, x, z = _load_table(path, schema, want_d=False, want_p=True)
    return StatedDataset.from_arrays(p, x, z)


def load_matched_csv(path, schema: dict[str, object] | None = None) -> MatchedDataset:
    """Load records carrying both the decision and the probability report."""
    d, p, x, z = _load_table(path, schema, want_d=True, want_p=True)
    return MatchedDataset.from_arrays(d, p, x, z)
