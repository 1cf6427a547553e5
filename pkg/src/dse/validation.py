"""End-to-end numerical self-checks behind ``dse validate``.

Each check returns a :class:`CheckResult` with the measured maximum error
and the tolerance it was held to.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from dse.core import CoeffVector, ModeSpec
from dse.distributions import gen_contracting_expanding_1d, gen_equispaced_1d, gen_random_cloud
from dse.fftref import fft_radix2
from dse.nudft import (
    brute_force_nudft,
    OvercompleteWarning,
    build_fourier_matrix,
    nudft_adjoint,
)
from dse.spherical import build_sh_matrix, dh_grid, dh_quadrature_weights, flat_from_sh


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    seconds: float = 0.0


def _result(name, err, tol, t0):
    return CheckResult(name, bool(err < tol), float(err), tol, time.perf_counter() - t0)


def _rand_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def check_equispaced_fft(sizes=(8, 64, 256, 1024), modes=(4, 16, None)):
    """Direct evaluation (no normalization) vs. the first m radix-2 outputs."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for n in sizes:
        pts = gen_equispaced_1d(n)
        x = _rand_complex(rng, n)
        ref = fft_radix2(x)
        for m in modes:
            m = n if m is None else m
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OvercompleteWarning)
                V = build_fourier_matrix(pts, ModeSpec.fourier(m), "none")
            got = V.entries @ x
            # past N the equispaced rows repeat with period N
            expect = ref[np.arange(m) % n]
            worst = max(worst, np.max(np.abs(got - expect)) / np.max(np.abs(expect)))
    return _result("equispaced_vs_fft", worst, 1e-10, t0)


def check_brute_force(instances=200, seed=2):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(instances):
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(1, 65))
        m = int(rng.integers(1, 5))
        fr = "symmetric" if rng.random() < 0.5 else "nonnegative"
        norm = ("paper", "unitary", "none")[i % 3]
        pts = gen_random_cloud(n, dim, seed=1000 + i)
        spec = ModeSpec.fourier(m, dim, fr)
        x = _rand_complex(rng, n, 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OvercompleteWarning)
            got = build_fourier_matrix(pts, spec, norm).entries @ x
        ref = brute_force_nudft(pts, spec, x, norm)
        worst = max(worst, np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1e-300))
    return _result("brute_force_oracle", worst, 1e-12, t0)


def check_adjoint_identity(seed=3):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim, n, m in ((1, 50, 9), (2, 80, 4), (3, 60, 3)):
        pts = gen_random_cloud(n, dim, seed=seed + n)
        V = build_fourier_matrix(pts, ModeSpec.fourier(m, dim, "symmetric"), "paper")
        x = _rand_complex(rng, n, 1)
        y = _rand_complex(rng, V.shape[0], 1)
        lhs = np.vdot(y, V.entries @ x)
        rhs = np.vdot(nudft_adjoint(V, CoeffVector(y, V.mode_spec)).values, x)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    return _result("adjoint_identity", worst, 1e-12, t0)


def check_unitarity(n=64, scale_error=0.0, seed=4):
    """``V conj(V).T = I`` and round trip for m = N equispaced, unitary scale."""
    t0 = time.perf_counter()
    pts = gen_equispaced_1d(n)
    V = build_fourier_matrix(pts, ModeSpec.fourier(n), "unitary").entries * (1.0 + scale_error)
    err = np.max(np.abs(V @ V.conj().T - np.eye(n)))
    x = _rand_complex(np.random.default_rng(seed), n)
    err = max(err, np.max(np.abs(V.conj().T @ (V @ x) - x)))
    return _result("unitarity", err, 1e-12, t0)


def check_2d_layout(seed=5):
    """Row j of the 2-D matrix carries (j mod m) p0 + (j div m) p1."""
    t0 = time.perf_counter()
    worst = 0.0
    for m in (1, 2, 3, 4):
        pts = gen_random_cloud(37, 2, seed=seed + m)
        V = build_fourier_matrix(pts, ModeSpec.fourier(m, 2), "paper").entries
        c = math.sqrt(2.0 / pts.n)
        p0, p1 = pts.coords[:, 0], pts.coords[:, 1]
        for j in range(m * m):
            expect = c * np.exp(-2j * np.pi * ((j % m) * p0 + (j // m) * p1))
            worst = max(worst, np.max(np.abs(V[j] - expect)))
    return _result("layout_2d", worst, 1e-14, t0)


def check_dh_round_trip(l_max=8, n_theta=32, seed=6):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    grid = dh_grid(n_theta)
    w = dh_quadrature_weights(n_theta).weights
    V = build_sh_matrix(grid, l_max).entries
    a = _rand_complex(rng, l_max * l_max, 1)
    synth = V.conj().T @ a
    back = V @ (w[:, None] * synth)
    err = np.max(np.abs(back - a))
    # projection of a single harmonic
    j = flat_from_sh(2, 1)
    e = np.zeros((l_max * l_max, 1), dtype=complex)
    e[j] = 1.0
    proj = V @ (w[:, None] * (V.conj().T @ e))
    err = max(err, np.max(np.abs(proj - e)))
    return _result("dh_round_trip", err, 1e-8, t0)


def check_gradients(n_probes=50, seed=7):
    from dse.operator import ModelConfig, finite_difference_check, init_params, make_task

    t0 = time.perf_counter()
    cfg = ModelConfig(width=8, n_layers=3, modes=9, loss="l2", seed=seed)
    pts = gen_contracting_expanding_1d(32, 0.5, 1.05)
    data = make_task("derivative", pts, 4, max_freq=4, seed=seed)
    params = init_params(cfg)
    report = finite_difference_check(cfg, params, data.inputs, data.targets, pts, n_probes, 1e-6, seed)
    worst = report.max_rel_error(1e-5)
    if report.max_unresolved_abs_error(1e-5) > report.noise:
        worst = float("inf")
    return _result("gradient_fd", worst, 1e-5, t0)


CHECKS = {
    "equispaced_vs_fft": check_equispaced_fft,
    "brute_force_oracle": check_brute_force,
    "adjoint_identity": check_adjoint_identity,
    "unitarity": check_unitarity,
    "layout_2d": check_2d_layout,
    "dh_round_trip": check_dh_round_trip,
    "gradient_fd": check_gradients,
}


def run_all(inject_fault=None):
    """Run every check. ``inject_fault='normalization'`` perturbs the unitary scale."""
    results = []
    for name, fn in CHECKS.items():
        if name == "unitarity" and inject_fault == "normalization":
            results.append(fn(scale_error=1e-6))
        else:
            results.append(fn())
    return results


def format_report(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  max_error    tolerance  seconds"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status:<6}  {r.max_error:.3e}  {r.tolerance:.0e}      {r.seconds:.2f}")
    return "\n".join(lines)
