"""Spherical-harmonic matrices on scattered points, plus equiangular quadrature.

Harmonics are orthonormal over the unit sphere with the Condon-Shortley
phase. Row ``j`` of the analysis matrix holds ``conj(Y_l^m)`` at every
point, with ``l = isqrt(j)`` and ``m = j - l*l - l``; this gives the same
``exp(-i ...)`` sign as the Fourier rows, so ``V @ x`` projects onto
``Y_l^m`` and the adjoint synthesizes ``sum a_lm Y_l^m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dse.core import (
    SPHERICAL,
    CoeffVector,
    Field,
    ModeSpec,
    PointSet,
    SpectralMatrix,
    check_binding,
    complex_matvec,
    complex_rmatvec,
)
from dse.errors import ConfigError, DomainError, ModeIndexError, ShapeError

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class ShIndex:
    j: int
    l: int
    m: int


def sh_index_from_flat(j: int) -> ShIndex:
    """Degree/order of flat row ``j``: ``l = floor(sqrt j)``, ``m = j - (l^2 + l)``."""
    if j < 0:
        raise ModeIndexError(f"flat harmonic index must be >= 0, got {j}")
    l = math.isqrt(j)
    return ShIndex(j, l, j - (l * l + l))


def flat_from_sh(l: int, m: int) -> int:
    if l < 0 or abs(m) > l:
        raise ModeIndexError(f"invalid harmonic (l={l}, m={m})")
    return l * l + l + m


def _legendre_table(l_max, x, s):
    """Normalized P_l^m for 0 <= m <= l < l_max; shape (l_max, l_max, N).

    ``x = cos(theta)`` and ``s = sin(theta)`` are passed separately; taking
    ``s`` from ``sqrt(1 - x^2)`` would lose accuracy near the poles.
    """
    x = np.asarray(x, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    table = np.zeros((l_max, l_max) + x.shape)
    diag = np.full(x.shape, 1.0 / math.sqrt(FOUR_PI))
    for m in range(l_max):
        if m > 0:
            diag = -math.sqrt((2 * m + 1) / (2 * m)) * s * diag
        table[m, m] = diag
        if m + 1 < l_max:
            table[m + 1, m] = math.sqrt(2 * m + 3) * x * diag
        for l in range(m + 2, l_max):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            a_prev = math.sqrt((4 * (l - 1) ** 2 - 1) / ((l - 1) ** 2 - m * m))
            table[l, m] = a * (x * table[l - 1, m] - table[l - 2, m] / a_prev)
    return table


def associated_legendre(l: int, m_abs: int, x):
    """Fully normalized associated Legendre function, Condon-Shortley phase.

    Scaled so that ``P(l, m, cos theta) * exp(i m phi)`` is an orthonormal
    spherical harmonic; ``associated_legendre(0, 0, x) == 1/sqrt(4 pi)``.
    """
    if m_abs < 0 or m_abs > l:
        raise ModeIndexError(f"order {m_abs} outside [0, {l}]")
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    return _legendre_table(l + 1, x, s)[l, m_abs]


def harmonic(l: int, m: int, theta, phi):
    """``Y_l^m(theta, phi)`` (orthonormal, Condon-Shortley)."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    p = _legendre_table(l + 1, np.cos(theta), np.sin(theta))[l, abs(m)]
    y = p * np.exp(1j * abs(m) * phi)
    if m < 0:
        y = (-1) ** abs(m) * np.conj(y)
    return y


def build_sh_matrix(points: PointSet, l_max: int) -> SpectralMatrix:
    """(l_max^2, N) analysis matrix; row j holds conj(Y_l^m) at each point."""
    if points.geometry != SPHERICAL:
        raise DomainError("spherical harmonic matrices need spherical points")
    spec = ModeSpec.spherical(l_max)
    theta, phi = points.theta, points.phi
    table = _legendre_table(l_max, np.cos(theta), np.sin(theta))
    entries = np.empty((spec.m_total, points.n), dtype=np.complex128)
    for m in range(l_max):
        phase = np.exp(-1j * m * phi)
        for l in range(m, l_max):
            row = table[l, m] * phase
            entries[l * l + l + m] = row
            if m > 0:
                # conj(Y_l^-m) = (-1)^m Y_l^m, and Y_l^m is the conjugate of this row
                entries[l * l + l - m] = (-1) ** m * np.conj(row)
    return SpectralMatrix(entries, spec, "none", points.fingerprint)


@dataclass(frozen=True, eq=False)
class QuadratureWeights:
    """Positive per-point weights in steradians; they sum to 4 pi."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ConfigError("quadrature weights must be positive and finite")
        if abs(w.sum() - FOUR_PI) > 1e-10:
            raise ConfigError(f"quadrature weights sum to {w.sum()!r}, expected 4 pi")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size


def dh_colatitudes(n_theta: int) -> np.ndarray:
    return np.pi * (2 * np.arange(n_theta) + 1) / (2 * n_theta)


def dh_grid(n_theta: int) -> PointSet:
    """Equiangular grid: ``n_theta`` colatitudes by ``2 n_theta`` longitudes.

    Points run over longitude fastest.
    """
    if n_theta < 2 or n_theta % 2:
        raise ConfigError(f"n_theta must be a positive even integer, got {n_theta}")
    theta = dh_colatitudes(n_theta)
    phi = 2.0 * np.pi * np.arange(2 * n_theta) / (2 * n_theta)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return PointSet.spherical(tt.ravel(), pp.ravel())


def dh_quadrature_weights(n_theta: int) -> QuadratureWeights:
    """Weights for :func:`dh_grid`, exact for band limits up to ``n_theta / 2``.

    The colatitude weights integrate polynomials in cos(theta) of degree
    below ``n_theta`` on the midpoint nodes; every longitude gets an equal
    share of 2 pi.
    """
    if n_theta < 2 or n_theta % 2:
        raise ConfigError(f"n_theta must be a positive even integer, got {n_theta}")
    theta = dh_colatitudes(n_theta)
    k = np.arange(1, n_theta // 2 + 1)
    series = np.cos(2.0 * np.outer(theta, k)) / (4.0 * k * k - 1.0)
    w_theta = (2.0 / n_theta) * (1.0 - 2.0 * series.sum(axis=1))
    n_phi = 2 * n_theta
    return QuadratureWeights(np.repeat(w_theta * (2.0 * np.pi / n_phi), n_phi))


def sh_forward(points: PointSet, l_max: int, field: Field,
               weights: QuadratureWeights | None = None) -> CoeffVector:
    """``V @ x``, or the quadrature projection ``V @ (w * x)`` when weighted."""
    check_binding(points, field)
    matrix = build_sh_matrix(points, l_max)
    if weights is None:
        return complex_matvec(matrix, field)
    w = weights.weights if isinstance(weights, QuadratureWeights) else np.asarray(weights, dtype=np.float64)
    if w.size != points.n:
        raise ShapeError(f"{w.size} weights for {points.n} points")
    weighted = Field(field.values * w[:, None], field.point_fingerprint)
    return complex_matvec(matrix, weighted)


def sh_adjoint(matrix: SpectralMatrix, coeffs: CoeffVector) -> Field:
    """Synthesize ``sum_lm a_lm Y_l^m`` at the matrix's points."""
    return complex_rmatvec(matrix, coeffs)
