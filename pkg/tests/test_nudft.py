import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dse import _backend
from dse.core import CoeffVector, Field, ModeSpec, PointSet
from dse.distributions import gen_equispaced_1d, gen_lattice_tanh_2d, gen_random_cloud
from dse.errors import BindingError, ConfigError, DomainError, ShapeError
from dse.fftref import fft_radix2
from dse.nudft import (
    OvercompleteWarning,
    brute_force_nudft,
    build_fourier_matrix,
    build_lattice_factors,
    clear_cache,
    estimate_flops,
    lattice_adjoint,
    lattice_forward,
    lattice_points,
    normalization_scale,
    nudft_adjoint,
    nudft_forward,
)

from conftest import rand_complex

# 30-digit reference values (mpmath), frozen
FROZEN_1D = [
    complex(-0.57735026918962576451, 0.28867513459481288225),
    complex(0.87125575890608345087, 0.6840199077692367238),
    complex(1.4203484946036380681, -0.50560886288269175783),
]
FROZEN_2D = [
    complex(1.0, 1.0),
    complex(-0.27876825791752570507, -0.14203952192020614801),
    complex(0.0, 1.9021130325903071442),
    complex(0.5, 1.5388417685876267013),
]


def test_frozen_1d_symmetric_paper():
    pts = PointSet.cartesian([0.1, 0.35, 0.8])
    f = Field.on(pts, [1.0, -2.0, 0.5j])
    out = nudft_forward(pts, ModeSpec.fourier(3, 1, "symmetric"), f, "paper").values[:, 0]
    np.testing.assert_allclose(out, FROZEN_1D, rtol=0, atol=1e-15)


def test_frozen_2d_layout():
    pts = PointSet.cartesian([[0.2, 0.7], [0.9, 0.05]])
    with pytest.warns(OvercompleteWarning):
        out = build_fourier_matrix(pts, ModeSpec.fourier(2, 2), "paper").entries @ np.array([1.0, 1j])
    np.testing.assert_allclose(out, FROZEN_2D, rtol=0, atol=4e-15)


def test_normalization_constants():
    assert normalization_scale("paper", 16, 1) == 0.25
    assert normalization_scale("paper", 16, 2) == math.sqrt(2 / 16)
    assert normalization_scale("unitary", 16, 3) == 0.25
    assert normalization_scale("none", 16, 3) == 1.0
    with pytest.raises(ConfigError):
        normalization_scale("ortho", 16, 1)


def test_first_row_is_constant():
    pts = gen_random_cloud(20, 2, seed=3)
    V = build_fourier_matrix(pts, ModeSpec.fourier(3, 2), "none").entries
    np.testing.assert_array_equal(V[0], np.ones(20))


@pytest.mark.parametrize("n", [8, 64, 256])
def test_equispaced_matches_fft(n, rng):
    x = rand_complex(rng, n)
    ref = fft_radix2(x)
    for m in (4, 16):
        V = build_fourier_matrix(gen_equispaced_1d(n), ModeSpec.fourier(min(m, n)), "none").entries
        np.testing.assert_allclose(V @ x, ref[: min(m, n)], rtol=0, atol=1e-10 * np.abs(ref).max())


def test_overcomplete_warns_and_rows_wrap():
    pts = gen_equispaced_1d(8)
    with pytest.warns(OvercompleteWarning):
        V = build_fourier_matrix(pts, ModeSpec.fourier(16), "none").entries
    np.testing.assert_allclose(V[8:], V[:8], atol=1e-13)


def test_symmetric_rows_are_conjugate_pairs():
    pts = gen_random_cloud(30, 1, seed=1)
    V = build_fourier_matrix(pts, ModeSpec.fourier(5, 1, "symmetric"), "none").entries
    np.testing.assert_allclose(V[4], np.conj(V[1]), atol=1e-15)
    np.testing.assert_allclose(V[3], np.conj(V[2]), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(dim=st.integers(1, 3), n=st.integers(1, 40), m=st.integers(1, 4),
       sym=st.booleans(), norm=st.sampled_from(["paper", "unitary", "none"]), seed=st.integers(0, 10**6))
def test_matrix_path_matches_literal_sum(dim, n, m, sym, norm, seed):
    pts = gen_random_cloud(n, dim, seed)
    spec = ModeSpec.fourier(m, dim, "symmetric" if sym else "nonnegative")
    x = rand_complex(np.random.default_rng(seed), n, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OvercompleteWarning)
        got = build_fourier_matrix(pts, spec, norm).entries @ x
    ref = brute_force_nudft(pts, spec, x, norm)
    assert np.max(np.abs(got - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_adjoint_inner_product(rng):
    pts = gen_random_cloud(40, 2, seed=9)
    V = build_fourier_matrix(pts, ModeSpec.fourier(4, 2, "symmetric"), "paper")
    x = rand_complex(rng, 40, 1)
    y = rand_complex(rng, 16, 1)
    lhs = np.vdot(y, V.entries @ x)
    rhs = np.vdot(nudft_adjoint(V, CoeffVector(y, V.mode_spec)).values, x)
    assert abs(lhs - rhs) < 1e-12 * abs(lhs)


@pytest.mark.parametrize("n", [4, 16, 64])
def test_unitary_round_trip(n, rng):
    pts = gen_equispaced_1d(n)
    V = build_fourier_matrix(pts, ModeSpec.fourier(n), "unitary")
    assert np.max(np.abs(V.entries @ V.adjoint_entries - np.eye(n))) < 1e-12
    x = rand_complex(rng, n, 3)
    coeffs = nudft_forward(pts, V.mode_spec, Field.on(pts, x), "unitary")
    back = nudft_adjoint(V, coeffs)
    assert np.max(np.abs(back.values - x)) < 1e-12


def test_forward_rejects_foreign_field():
    a = gen_random_cloud(5, 1, seed=1)
    b = gen_random_cloud(5, 1, seed=2)
    with pytest.raises(BindingError):
        nudft_forward(a, ModeSpec.fourier(2), Field.on(b, np.ones(5)))


def test_dimension_and_geometry_checks():
    with pytest.raises(ConfigError):
        build_fourier_matrix(gen_random_cloud(5, 2, 0), ModeSpec.fourier(2, 1))
    with pytest.raises(DomainError):
        build_fourier_matrix(PointSet.spherical([1.0], [1.0]), ModeSpec.fourier(2, 2))


def test_cache_returns_same_result():
    clear_cache()
    pts = gen_random_cloud(10, 1, seed=4)
    f = Field.on(pts, np.arange(10.0))
    a = nudft_forward(pts, ModeSpec.fourier(3), f)
    b = nudft_forward(pts, ModeSpec.fourier(3), f)
    np.testing.assert_array_equal(a.values, b.values)


def test_backends_build_identical_entries():
    if len(_backend.available()) < 2:
        pytest.skip("compiled kernels not built")
    pts = gen_random_cloud(50, 3, seed=5)
    freqs = np.ascontiguousarray(ModeSpec.fourier(3, 3, "symmetric").frequency_table(), dtype=np.float64)
    a = _backend.get("compiled").build_exponential(freqs, pts.coords, 0.5)
    b = _backend.get("python").build_exponential(freqs, pts.coords, 0.5)
    assert np.max(np.abs(a - b)) < 1e-14


def test_lattice_matches_general_transform(rng):
    ax0, ax1 = gen_lattice_tanh_2d(12, 9, focus=(0.3, 0.6), sharpness=2.5)
    fac = build_lattice_factors((ax0, ax1), 4, "unitary")
    assert fac.entry_count == 4 * (12 + 9)
    x = rng.normal(size=(12, 9))
    got = lattice_forward(fac, x)
    pts = lattice_points((ax0, ax1))
    V = build_fourier_matrix(pts, ModeSpec.fourier(4, 2), "unitary").entries
    ref = (V @ x.ravel(order="F")).reshape(4, 4, order="F")
    assert np.max(np.abs(got - ref)) < 1e-12
    np.testing.assert_allclose(got, fac.v_axis0 @ x @ fac.v_axis1.T, atol=1e-13)


def test_lattice_adjoint_identity(rng):
    fac = build_lattice_factors((np.linspace(0, 1, 7), np.linspace(0, 1, 5) ** 2), (3, 2))
    x = rand_complex(rng, 7, 5)
    y = rand_complex(rng, 3, 2)
    assert abs(np.vdot(y, lattice_forward(fac, x)) - np.vdot(lattice_adjoint(fac, y), x)) < 1e-12


def test_lattice_errors():
    with pytest.raises(DomainError):
        build_lattice_factors((np.array([0.5, 0.1]), np.array([0.0, 1.0])), 2)
    fac = build_lattice_factors((np.linspace(0, 1, 4), np.linspace(0, 1, 3)), 2)
    with pytest.raises(ShapeError):
        lattice_forward(fac, np.zeros((3, 4)))


def test_flop_model():
    assert estimate_flops(1024, 16) == 61440
    assert estimate_flops(100, 1) == 0
    assert estimate_flops(10, 9, dim=2) == 8 * 10 * 9
    with pytest.raises(ConfigError):
        estimate_flops(0, 4)
