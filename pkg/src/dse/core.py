"""Shared domain types, mode-index arithmetic and the dense complex product.

All containers are immutable: arrays are copied on construction and marked
read-only, so a PointSet or SpectralMatrix can be shared across threads and
cached without defensive copies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from dse._backend import kernels
from dse.errors import BindingError, ConfigError, DomainError, ModeIndexError, ShapeError

CARTESIAN = "cartesian"
SPHERICAL = "spherical"

NORMALIZATIONS = ("paper", "unitary", "none")
FREQUENCY_RANGES = ("nonnegative", "symmetric")


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, order="C", copy=True)
    out.setflags(write=False)
    return out


def fingerprint(array) -> int:
    """64-bit FNV-1a hash of the little-endian float64 bytes of ``array``."""
    raw = np.ascontiguousarray(array, dtype="<f8")
    return int(kernels.fnv1a64(raw.view(np.uint8).reshape(-1)))


@dataclass(frozen=True, eq=False)
class PointSet:
    """N sample positions, either in the unit cube or as (theta, phi) on the sphere.

    ``coords`` has shape (N, D); for spherical sets D == 2 and the columns
    are colatitude and azimuth.
    """

    coords: np.ndarray
    geometry: str = CARTESIAN

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ShapeError(f"point coordinates must be (N, D) with N, D >= 1, got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise DomainError("point coordinates must be finite")
        if self.geometry == CARTESIAN:
            if coords.min() < 0.0 or coords.max() > 1.0:
                raise DomainError(
                    f"cartesian coordinates must lie in [0, 1], got range "
                    f"[{coords.min():.17g}, {coords.max():.17g}]"
                )
        elif self.geometry == SPHERICAL:
            if coords.shape[1] != 2:
                raise ShapeError("spherical points need exactly two angle columns (theta, phi)")
            theta, phi = coords[:, 0], coords[:, 1]
            if theta.min() < 0.0 or theta.max() > math.pi:
                raise DomainError("theta must lie in [0, pi]")
            if phi.min() < 0.0 or phi.max() >= 2.0 * math.pi:
                raise DomainError("phi must lie in [0, 2 pi)")
        else:
            raise ConfigError(f"unknown geometry {self.geometry!r}")
        object.__setattr__(self, "coords", _frozen(coords, np.float64))

    @classmethod
    def cartesian(cls, coords) -> "PointSet":
        return cls(coords, CARTESIAN)

    @classmethod
    def spherical(cls, theta, phi) -> "PointSet":
        return cls(np.column_stack([np.ravel(theta), np.ravel(phi)]), SPHERICAL)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def theta(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def phi(self) -> np.ndarray:
        return self.coords[:, 1]

    @cached_property
    def fingerprint(self) -> int:
        return fingerprint(self.coords)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.geometry == other.geometry
            and self.coords.shape == other.coords.shape
            and self.coords.tobytes() == other.coords.tobytes()
        )

    def __hash__(self):
        return self.fingerprint

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class ModeSpec:
    """Which modes a transform keeps.

    Fourier specs carry one mode count per dimension; spherical specs carry
    the degree bound ``l_max`` (degrees ``0 .. l_max - 1``).
    """

    kind: str
    modes_per_dim: tuple = ()
    l_max: int = 0
    frequency_range: str = "nonnegative"

    def __post_init__(self):
        if self.kind == "fourier":
            modes = tuple(int(m) for m in self.modes_per_dim)
            if not modes:
                raise ConfigError("fourier mode spec needs at least one dimension")
            if any(m < 1 for m in modes):
                raise ConfigError(f"mode counts must be >= 1, got {modes}")
            if self.frequency_range not in FREQUENCY_RANGES:
                raise ConfigError(f"frequency_range must be one of {FREQUENCY_RANGES}")
            if math.prod(modes) > np.iinfo(np.int64).max:
                raise ConfigError("total mode count overflows a 64-bit index")
            object.__setattr__(self, "modes_per_dim", modes)
        elif self.kind == "spherical":
            if int(self.l_max) < 1:
                raise ConfigError(f"l_max must be >= 1, got {self.l_max}")
            object.__setattr__(self, "l_max", int(self.l_max))
        else:
            raise ConfigError(f"unknown mode kind {self.kind!r}")

    @classmethod
    def fourier(cls, m, dim: int = 1, frequency_range: str = "nonnegative") -> "ModeSpec":
        if isinstance(m, (int, np.integer)):
            modes = (int(m),) * dim
        else:
            modes = tuple(m)
        return cls("fourier", modes, 0, frequency_range)

    @classmethod
    def spherical(cls, l_max: int) -> "ModeSpec":
        return cls("spherical", (), l_max)

    @property
    def dim(self) -> int:
        return len(self.modes_per_dim)

    @property
    def m_total(self) -> int:
        if self.kind == "spherical":
            return self.l_max**2
        return math.prod(self.modes_per_dim)

    def axis_frequencies(self, m: int) -> np.ndarray:
        """Integer frequencies for one axis with ``m`` modes, in row order."""
        if self.frequency_range == "nonnegative":
            return np.arange(m, dtype=np.int64)
        return np.fft.fftfreq(m, d=1.0 / m).astype(np.int64)

    def frequency_table(self) -> np.ndarray:
        """(m_total, D) integer frequencies; first axis varies fastest."""
        if self.kind != "fourier":
            raise ConfigError("frequency table is only defined for fourier specs")
        rows = np.arange(self.m_total, dtype=np.int64)
        digits = unflatten_mode_index_array(rows, self.modes_per_dim)
        table = np.empty_like(digits)
        for d, m in enumerate(self.modes_per_dim):
            table[:, d] = self.axis_frequencies(m)[digits[:, d]]
        return table


@dataclass(frozen=True, eq=False)
class SpectralMatrix:
    """Dense (m_total, N) transform matrix plus what it was built from."""

    entries: np.ndarray
    mode_spec: ModeSpec
    normalization: str
    point_fingerprint: int
    n_points: int = field(init=False)

    def __post_init__(self):
        entries = _frozen(self.entries, np.complex128)
        if entries.ndim != 2:
            raise ShapeError("spectral matrix must be two-dimensional")
        if entries.shape[0] != self.mode_spec.m_total:
            raise ShapeError(
                f"matrix has {entries.shape[0]} rows but the mode spec has {self.mode_spec.m_total} modes"
            )
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "n_points", entries.shape[1])

    @property
    def shape(self):
        return self.entries.shape

    @cached_property
    def adjoint_entries(self) -> np.ndarray:
        adj = np.ascontiguousarray(self.entries.conj().T)
        adj.setflags(write=False)
        return adj


@dataclass(frozen=True, eq=False)
class Field:
    """Complex values at N points, C channels, tied to a PointSet by fingerprint."""

    values: np.ndarray
    point_fingerprint: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ShapeError(f"field values must be (N, C), got shape {values.shape}")
        object.__setattr__(self, "values", _frozen(values, np.complex128))

    @classmethod
    def on(cls, points: PointSet, values) -> "Field":
        values = np.asarray(values)
        n_rows = values.shape[0] if values.ndim else 0
        if n_rows != points.n:
            raise ShapeError(f"field has {n_rows} rows but the point set has {points.n} points")
        return cls(values, points.fingerprint)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class CoeffVector:
    """Spectral coefficients, (m_total, C)."""

    values: np.ndarray
    mode_spec: ModeSpec

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.mode_spec.m_total:
            raise ShapeError(
                f"coefficient block has {values.shape[0]} rows, expected {self.mode_spec.m_total}"
            )
        object.__setattr__(self, "values", _frozen(values, np.complex128))

    @property
    def channels(self) -> int:
        return self.values.shape[1]


def _radices(m, length=None):
    if isinstance(m, (int, np.integer)):
        if length is None:
            raise ConfigError("dimension count is required with a scalar mode count")
        return (int(m),) * length
    return tuple(int(v) for v in m)


def flatten_mode_index(multi_index: Sequence[int], m) -> int:
    """Flat row of a per-axis mode index; axis 0 varies fastest.

    >>> flatten_mode_index([3, 2], 4)
    11
    """
    radices = _radices(m, len(multi_index))
    if len(radices) != len(multi_index):
        raise ConfigError("multi-index and mode counts differ in length")
    j = 0
    stride = 1
    for digit, radix in zip(multi_index, radices):
        if not 0 <= digit < radix:
            raise ModeIndexError(f"mode index component {digit} outside [0, {radix})")
        j += int(digit) * stride
        stride *= radix
    return j


def unflatten_mode_index(j: int, m, dim: int | None = None) -> list:
    """Inverse of :func:`flatten_mode_index`."""
    radices = _radices(m, dim)
    total = math.prod(radices)
    if not 0 <= j < total:
        raise ModeIndexError(f"flat index {j} outside [0, {total})")
    out = []
    for radix in radices:
        out.append(j % radix)
        j //= radix
    return out


def unflatten_mode_index_array(rows: np.ndarray, radices) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    out = np.empty((rows.size, len(radices)), dtype=np.int64)
    rest = rows.copy()
    for d, radix in enumerate(radices):
        out[:, d] = rest % radix
        rest //= radix
    return out


def complex_matvec(matrix: SpectralMatrix, field: Field) -> CoeffVector:
    """Apply ``matrix`` to every channel of ``field``."""
    if field.n != matrix.n_points:
        raise ShapeError(f"matrix has {matrix.n_points} columns but the field has {field.n} rows")
    out = kernels.matvec(matrix.entries, field.values)
    return CoeffVector(out, matrix.mode_spec)


def complex_rmatvec(matrix: SpectralMatrix, coeffs: CoeffVector, point_fingerprint=None) -> Field:
    """Apply the conjugate transpose of ``matrix`` to every coefficient channel."""
    if coeffs.values.shape[0] != matrix.shape[0]:
        raise ShapeError(
            f"matrix has {matrix.shape[0]} rows but the coefficient block has {coeffs.values.shape[0]}"
        )
    out = kernels.rmatvec(matrix.entries, coeffs.values)
    fp = matrix.point_fingerprint if point_fingerprint is None else point_fingerprint
    return Field(out, fp)


def check_binding(points: PointSet, field: Field) -> None:
    if field.n != points.n:
        raise ShapeError(f"field has {field.n} rows but the point set has {points.n} points")
    if field.point_fingerprint is not None and field.point_fingerprint != points.fingerprint:
        raise BindingError("field was sampled on a different point set")
