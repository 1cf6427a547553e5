import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import sph_harm_y

from dse.core import CoeffVector, Field, ModeSpec, PointSet
from dse.distributions import gen_sphere_uniform
from dse.errors import ConfigError, DomainError, ModeIndexError, ShapeError
from dse.spherical import (
    FOUR_PI,
    QuadratureWeights,
    associated_legendre,
    build_sh_matrix,
    dh_colatitudes,
    dh_grid,
    dh_quadrature_weights,
    flat_from_sh,
    harmonic,
    sh_adjoint,
    sh_forward,
    sh_index_from_flat,
)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_deriv(a, times):
    for _ in range(times):
        a = [i * c for i, c in enumerate(a)][1:] or [Fraction(0)]
    return a


def rodrigues_legendre(l, m, x):
    """Normalized P_l^m(x) from Rodrigues' formula, exact up to the final sqrt."""
    base = [Fraction(1)]
    for _ in range(l):
        base = _poly_mul(base, [Fraction(-1), Fraction(0), Fraction(1)])  # (x^2 - 1)^l
    poly = _poly_deriv(base, l + m)
    xf = Fraction(x)
    value = sum(c * xf**i for i, c in enumerate(poly)) / (2**l * math.factorial(l))
    value *= (-1) ** m
    norm = (2 * l + 1) / FOUR_PI * math.factorial(l - m) / math.factorial(l + m)
    return float(value) * (1 - float(xf) ** 2) ** (m / 2) * math.sqrt(norm)


@pytest.mark.parametrize("x", ["-0.9", "-0.3", "0", "0.25", "0.7", "1"])
def test_legendre_against_rodrigues(x):
    for l in range(0, 9):
        for m in range(0, l + 1):
            got = float(associated_legendre(l, m, float(Fraction(x))))
            ref = rodrigues_legendre(l, m, Fraction(x))
            assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref)), (l, m, x)


def test_legendre_known_values():
    assert associated_legendre(0, 0, 0.3) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-16)
    # P_1^1 carries the Condon-Shortley sign
    assert associated_legendre(1, 1, 0.0) == pytest.approx(-math.sqrt(3 / (8 * math.pi)), abs=1e-15)
    with pytest.raises(DomainError):
        associated_legendre(2, 1, 1.5)
    with pytest.raises(ModeIndexError):
        associated_legendre(2, 3, 0.0)


def test_harmonic_matches_scipy(rng):
    theta = rng.uniform(0, np.pi, 50)
    phi = rng.uniform(0, 2 * np.pi, 50)
    for l in range(0, 12):
        for m in range(-l, l + 1):
            ref = sph_harm_y(l, m, theta, phi)
            np.testing.assert_allclose(harmonic(l, m, theta, phi), ref, atol=1e-12)


def test_high_degree_stable():
    theta = np.linspace(0.01, np.pi - 0.01, 40)
    ref = sph_harm_y(60, 35, theta, 0.3)
    np.testing.assert_allclose(harmonic(60, 35, theta, 0.3), ref, atol=1e-11)


def test_index_map_bijective():
    seen = set()
    for j in range(16 * 16):
        ix = sh_index_from_flat(j)
        assert ix.l == math.floor(math.sqrt(j))
        assert ix.m == j - ix.l**2 - ix.l
        assert -ix.l <= ix.m <= ix.l
        assert flat_from_sh(ix.l, ix.m) == j
        seen.add((ix.l, ix.m))
    assert len(seen) == 256
    with pytest.raises(ModeIndexError):
        sh_index_from_flat(-1)
    with pytest.raises(ModeIndexError):
        flat_from_sh(2, 3)


def test_matrix_rows_are_conjugate_harmonics():
    pts = gen_sphere_uniform(30, seed=2)
    V = build_sh_matrix(pts, 5).entries
    for j in range(25):
        ix = sh_index_from_flat(j)
        np.testing.assert_allclose(V[j], np.conj(harmonic(ix.l, ix.m, pts.theta, pts.phi)), atol=1e-14)


def test_poles_give_zero_for_nonzero_order():
    pts = PointSet.spherical([0.0, math.pi], [0.7, 1.3])
    V = build_sh_matrix(pts, 6).entries
    for j in range(36):
        if sh_index_from_flat(j).m != 0:
            assert V[j, 0] == 0.0
            assert abs(V[j, 1]) < 1e-15  # sin(pi) is not exactly zero in floating point


def test_dh_grid_layout():
    grid = dh_grid(4)
    assert grid.n == 32
    np.testing.assert_allclose(grid.theta[:8], np.full(8, np.pi / 8))
    np.testing.assert_allclose(grid.phi[:8], 2 * np.pi * np.arange(8) / 8)
    np.testing.assert_allclose(dh_colatitudes(2), [np.pi / 4, 3 * np.pi / 4])
    with pytest.raises(ConfigError):
        dh_grid(5)


@pytest.mark.parametrize("n_theta", [2, 4, 8, 16, 32])
def test_weights_sum_and_positivity(n_theta):
    w = dh_quadrature_weights(n_theta).weights
    assert np.all(w > 0)
    assert abs(w.sum() - 4 * np.pi) < 1e-12


def test_weights_integrate_cos_powers():
    # int_0^pi cos^k sin dtheta = 2/(k+1) for even k, 0 for odd k
    n = 16
    w = dh_quadrature_weights(n).weights.reshape(n, 2 * n).sum(axis=1) / (2 * np.pi)
    x = np.cos(dh_colatitudes(n))
    for k in range(n):
        ref = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        assert abs(np.sum(w * x**k) - ref) < 1e-13


def test_quadrature_weights_validation():
    with pytest.raises(ConfigError):
        QuadratureWeights(np.full(4, 1.0))
    with pytest.raises(ConfigError):
        QuadratureWeights(np.array([4 * np.pi + 1, -1.0]))


def test_gram_identity_on_grid():
    V = build_sh_matrix(dh_grid(16), 8).entries
    w = dh_quadrature_weights(16).weights
    G = (V * w) @ V.conj().T
    assert np.max(np.abs(G - np.eye(64))) < 1e-13


def test_projection_of_single_harmonic():
    grid = dh_grid(16)
    w = dh_quadrature_weights(16)
    values = harmonic(3, -2, grid.theta, grid.phi)
    c = sh_forward(grid, 8, Field.on(grid, values), w).values[:, 0].copy()
    j = flat_from_sh(3, -2)
    assert abs(c[j] - 1.0) < 1e-12
    c[j] = 0
    assert np.max(np.abs(c)) < 1e-12


def test_synthesis_round_trip(rng):
    grid = dh_grid(16)
    V = build_sh_matrix(grid, 8)
    a = CoeffVector(rng.normal(size=64) + 1j * rng.normal(size=64), ModeSpec.spherical(8))
    f = sh_adjoint(V, a)
    back = sh_forward(grid, 8, Field.on(grid, f.values), dh_quadrature_weights(16))
    assert np.max(np.abs(back.values - a.values)) < 1e-12


def test_forward_argument_checks():
    pts = gen_sphere_uniform(10, seed=0)
    f = Field.on(pts, np.ones(10))
    with pytest.raises(ShapeError):
        sh_forward(pts, 3, f, np.ones(9))
    with pytest.raises(DomainError):
        build_sh_matrix(PointSet.cartesian([0.5]), 3)
    unweighted = sh_forward(pts, 3, f)
    np.testing.assert_allclose(unweighted.values, build_sh_matrix(pts, 3).entries @ np.ones((10, 1)))
