"""Truncated nonuniform Fourier matrices (type-II NUDFT) and their transforms.

Row ``j`` of a D-dimensional matrix carries the frequency vector obtained by
reading ``j`` in base ``m`` with axis 0 as the least significant digit, so
for D = 2 the rows run over axis-0 frequencies first, then step the axis-1
frequency. Column ``k`` is point ``k``.
"""
from __future__ import annotations

import cmath
import math
import threading
import warnings
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from dse._backend import kernels
from dse.core import (
    CARTESIAN,
    NORMALIZATIONS,
    CoeffVector,
    Field,
    ModeSpec,
    PointSet,
    SpectralMatrix,
    check_binding,
    complex_matvec,
    complex_rmatvec,
)
from dse.errors import ConfigError, DomainError, ShapeError

__all__ = [
    "OvercompleteWarning",
    "LatticeFactors",
    "normalization_scale",
    "build_fourier_matrix",
    "build_fourier_matrix_1d",
    "build_fourier_matrix_nd",
    "nudft_forward",
    "nudft_adjoint",
    "build_lattice_factors",
    "lattice_forward",
    "lattice_adjoint",
    "lattice_points",
    "brute_force_nudft",
    "estimate_flops",
    "clear_cache",
]


class OvercompleteWarning(UserWarning):
    """More modes than points: the adjoint no longer acts as a left inverse."""


def normalization_scale(normalization: str, n: int, dim: int) -> float:
    """Prefactor of the transform matrix.

    ``paper`` keeps 1/sqrt(N) in one dimension and sqrt(D/N) above it.
    """
    if normalization == "paper":
        return 1.0 / math.sqrt(n) if dim == 1 else math.sqrt(dim / n)
    if normalization == "unitary":
        return 1.0 / math.sqrt(n)
    if normalization == "none":
        return 1.0
    raise ConfigError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")


def _check_inputs(points: PointSet, modes: ModeSpec):
    if points.geometry != CARTESIAN:
        raise DomainError("Fourier matrices need cartesian points")
    if modes.kind != "fourier":
        raise ConfigError("Fourier matrices need a fourier mode spec")
    if modes.dim != points.dim:
        raise ConfigError(f"mode spec is {modes.dim}-D but the points are {points.dim}-D")
    if modes.m_total > points.n:
        warnings.warn(
            f"{modes.m_total} modes on {points.n} points: transform is over-complete",
            OvercompleteWarning,
            stacklevel=3,
        )


def _build(points, modes, normalization):
    scale = normalization_scale(normalization, points.n, points.dim)
    freqs = np.ascontiguousarray(modes.frequency_table(), dtype=np.float64)
    entries = kernels.build_exponential(freqs, points.coords, scale)
    return SpectralMatrix(entries, modes, normalization, points.fingerprint)


def build_fourier_matrix_1d(points: PointSet, modes: ModeSpec, normalization: str = "paper") -> SpectralMatrix:
    """(m, N) matrix with entries ``c * exp(-2 pi i f_j p_k)``."""
    if points.dim != 1:
        raise ConfigError(f"1-D builder got {points.dim}-D points")
    _check_inputs(points, modes)
    return _build(points, modes, normalization)


def build_fourier_matrix_nd(points: PointSet, modes: ModeSpec, normalization: str = "paper") -> SpectralMatrix:
    """(prod m_d, N) matrix over a D-dimensional cloud, D >= 2."""
    if points.dim < 2:
        raise ConfigError("N-D builder needs D >= 2; use build_fourier_matrix_1d")
    _check_inputs(points, modes)
    return _build(points, modes, normalization)


def build_fourier_matrix(points: PointSet, modes: ModeSpec, normalization: str = "paper") -> SpectralMatrix:
    if points.dim == 1:
        return build_fourier_matrix_1d(points, modes, normalization)
    return build_fourier_matrix_nd(points, modes, normalization)


class _MatrixCache:
    def __init__(self, maxsize=16):
        self.maxsize = maxsize
        self._items = OrderedDict()
        self._lock = threading.Lock()

    def get(self, points, modes, normalization):
        key = (points.fingerprint, points.coords.shape, modes, normalization)
        with self._lock:
            hit = self._items.get(key)
            if hit is not None:
                self._items.move_to_end(key)
                return hit
        matrix = build_fourier_matrix(points, modes, normalization)
        with self._lock:
            self._items[key] = matrix
            self._items.move_to_end(key)
            while len(self._items) > self.maxsize:
                self._items.popitem(last=False)
        return matrix

    def clear(self):
        with self._lock:
            self._items.clear()

    def __len__(self):
        return len(self._items)


_cache = _MatrixCache()


def clear_cache():
    _cache.clear()


def nudft_forward(points: PointSet, modes: ModeSpec, field: Field, normalization: str = "paper") -> CoeffVector:
    """Coefficients ``V x`` with the matrix served from a small LRU cache."""
    check_binding(points, field)
    return complex_matvec(_cache.get(points, modes, normalization), field)


def nudft_adjoint(matrix: SpectralMatrix, coeffs: CoeffVector) -> Field:
    """Point values ``conj(V).T X``."""
    return complex_rmatvec(matrix, coeffs)


@dataclass(frozen=True, eq=False)
class LatticeFactors:
    """Per-axis 1-D matrices for points on a tensor-product lattice."""

    factors: tuple
    axes: tuple
    mode_spec: ModeSpec
    normalization: str

    @property
    def entry_count(self) -> int:
        return sum(f.size for f in self.factors)

    @property
    def shape(self):
        return tuple(a.size for a in self.axes)

    @property
    def v_axis0(self):
        return self.factors[0]

    @property
    def v_axis1(self):
        return self.factors[1]


def build_lattice_factors(axes, m, normalization: str = "unitary",
                          frequency_range: str = "nonnegative") -> LatticeFactors:
    """One 1-D matrix per axis, each scaled by ``1/sqrt(N_axis)`` under unitary.

    Their separable product reproduces the unitary N-D matrix on the lattice
    while storing only ``m * sum(N_axis)`` entries.
    """
    axes = tuple(np.asarray(a, dtype=np.float64).reshape(-1) for a in axes)
    if len(axes) < 1:
        raise ConfigError("need at least one axis")
    if isinstance(m, (int, np.integer)):
        m = (int(m),) * len(axes)
    if len(m) != len(axes):
        raise ConfigError("one mode count per axis is required")
    factors = []
    for axis, m_axis in zip(axes, m):
        if np.any(np.diff(axis) < 0):
            raise DomainError("lattice axis coordinates must be sorted")
        pts = PointSet.cartesian(axis)
        spec = ModeSpec.fourier(m_axis, 1, frequency_range)
        if normalization == "none":
            scale = 1.0
        else:
            scale = 1.0 / math.sqrt(pts.n)
        freqs = np.ascontiguousarray(spec.frequency_table(), dtype=np.float64)
        mat = kernels.build_exponential(freqs, pts.coords, scale)
        mat.setflags(write=False)
        factors.append(mat)
    spec = ModeSpec.fourier(tuple(m), len(axes), frequency_range)
    return LatticeFactors(tuple(factors), axes, spec, normalization)


def lattice_points(axes) -> PointSet:
    """Flatten a lattice into a point set, axis 0 varying fastest."""
    grids = np.meshgrid(*[np.asarray(a, dtype=np.float64) for a in axes], indexing="ij")
    return PointSet.cartesian(np.column_stack([g.ravel(order="F") for g in grids]))


def lattice_forward(factors: LatticeFactors, field) -> np.ndarray:
    """Separable transform; for two axes ``V0 @ field @ V1.T``.

    ``field`` has the lattice shape, optionally followed by a channel axis.
    The result has shape ``(m_0, m_1, ...)`` (plus channels).
    """
    values = np.asarray(field)
    dim = len(factors.factors)
    if values.shape[:dim] != factors.shape:
        raise ShapeError(f"field shape {values.shape} does not match lattice {factors.shape}")
    out = values.astype(np.complex128)
    for d, mat in enumerate(factors.factors):
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [d])), 0, d)
    return out


def lattice_adjoint(factors: LatticeFactors, coeffs) -> np.ndarray:
    """Conjugate transpose of :func:`lattice_forward`."""
    out = np.asarray(coeffs, dtype=np.complex128)
    for d, mat in enumerate(factors.factors):
        out = np.moveaxis(np.tensordot(mat.conj().T, out, axes=([1], [d])), 0, d)
    return out


def brute_force_nudft(points: PointSet, modes: ModeSpec, field, normalization: str = "none") -> np.ndarray:
    """Literal summation of the type-II NUDFT, one term at a time.

    Deliberately shares nothing with the matrix path: frequencies, index
    digits and the prefactor are all recomputed here with scalar math.
    Returns an (m_total, C) array.
    """
    coords = np.asarray(points.coords, dtype=np.float64)
    values = np.asarray(getattr(field, "values", field))
    if values.ndim == 1:
        values = values[:, None]
    n, dim = coords.shape
    if values.shape[0] != n:
        raise ShapeError(f"field has {values.shape[0]} rows but there are {n} points")
    radices = list(modes.modes_per_dim)
    if len(radices) != dim:
        raise ShapeError("mode spec and points disagree on dimension")
    if normalization == "none":
        c = 1.0
    elif normalization == "unitary" or dim == 1:
        c = 1.0 / math.sqrt(n)
    else:
        c = math.sqrt(dim / n)

    def axis_freq(digit, radix):
        if modes.frequency_range == "symmetric" and digit >= (radix + 1) // 2:
            return digit - radix
        return digit

    total = 1
    for r in radices:
        total *= r
    channels = values.shape[1]
    out = np.zeros((total, channels), dtype=np.complex128)
    for j in range(total):
        freq = []
        rest = j
        for r in radices:
            freq.append(axis_freq(rest % r, r))
            rest //= r
        for ch in range(channels):
            acc = 0j
            for k in range(n):
                dot = 0.0
                for d in range(dim):
                    dot += freq[d] * float(coords[k, d])
                acc += complex(values[k, ch]) * cmath.exp(-2j * math.pi * dot)
            out[j, ch] = c * acc
    return out


def estimate_flops(n: int, m_total: int, dim: int = 1) -> float:
    """Flop model for one transform.

    1-D real input: 4*N*m - 4*N. Higher dimensions use a complex
    multiply-add count of 8*N*m_total.
    """
    if n <= 0 or m_total <= 0 or dim <= 0:
        raise ConfigError("flop model needs positive arguments")
    if dim == 1:
        return float(4 * n * m_total - 4 * n)
    return float(8 * n * m_total)
