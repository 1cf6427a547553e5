"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together at
the end of the pytest run (see ``conftest.py``) and immediately when run
with ``-s``.
"""
import math
import time
import warnings

import numpy as np
import pytest

from dse import cli
from dse.bench import crossover_modes, fit_scaling_exponent, linear_fit, run_mode_sweep, sweep_modes, sweep_points
from dse.core import CoeffVector, Field, ModeSpec
from dse.distributions import gen_contracting_expanding_1d, gen_equispaced_1d, gen_lattice_tanh_2d, gen_random_cloud
from dse.fftref import fft_radix2
from dse.nudft import (
    OvercompleteWarning,
    brute_force_nudft,
    build_fourier_matrix,
    build_lattice_factors,
    estimate_flops,
    lattice_forward,
    lattice_points,
    nudft_adjoint,
)
from dse.operator import (
    ModelConfig,
    evaluate,
    finite_difference_check,
    init_params,
    load_checkpoint,
    make_task,
    train,
)
from dse.spherical import (
    build_sh_matrix,
    dh_grid,
    dh_quadrature_weights,
    flat_from_sh,
    harmonic,
    sh_index_from_flat,
)

TITLES = {
    1: "equispaced points reproduce the radix-2 FFT",
    2: "matrix path equals literal summation",
    3: "2-D matrix row layout",
    4: "unitarity and round trip",
    5: "lattice factors equal the general transform",
    6: "spherical index map, projection and round trip",
    7: "analytic gradients vs. finite differences",
    8: "toy operator learning (derivative, identity)",
    9: "complexity scaling and flop model",
    10: "cross-resolution generalization",
}
RESULTS = {}


def record(n, passed, detail):
    RESULTS[n] = (bool(passed), detail)
    print(f"\n{_line(n)}")


def _line(n):
    if n not in RESULTS:
        return f"[criterion {n:2d}] FAIL  {TITLES[n]}: no result (not run, or errored before measuring)"
    passed, detail = RESULTS[n]
    return f"[criterion {n:2d}] {'PASS' if passed else 'FAIL'}  {TITLES[n]}: {detail}"


def summary_lines():
    return [_line(n) for n in sorted(TITLES)]


def _crand(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


# 1 -------------------------------------------------------------------------

def test_criterion_01_fft_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for n in (8, 64, 256, 1024):
        pts = gen_equispaced_1d(n)
        x = _crand(rng, n)
        ref = fft_radix2(x)
        for m in (4, 16, n):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OvercompleteWarning)
                V = build_fourier_matrix(pts, ModeSpec.fourier(m), "none").entries
            # m > N only happens for N = 8, m = 16: row k then equals FFT output k mod N
            expect = ref[np.arange(m) % n]
            worst = max(worst, np.max(np.abs(V @ x - expect)) / np.max(np.abs(expect)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5.0
    record(1, ok, f"max rel err {worst:.2e} (tol 1e-10), {elapsed:.2f} s (limit 5 s)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_02_brute_force():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(200):
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(1, 65))
        m = int(rng.integers(1, 5))
        spec = ModeSpec.fourier(m, dim, "symmetric" if rng.random() < 0.5 else "nonnegative")
        norm = ("paper", "unitary", "none")[i % 3]
        pts = gen_random_cloud(n, dim, seed=10_000 + i)
        x = _crand(rng, n, 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OvercompleteWarning)
            got = build_fourier_matrix(pts, spec, norm).entries @ x
        ref = brute_force_nudft(pts, spec, x, norm)
        worst = max(worst, np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and elapsed < 10.0
    record(2, ok, f"200 instances, max rel err {worst:.2e} (tol 1e-12), {elapsed:.2f} s (limit 10 s)")
    assert ok


# 3 -------------------------------------------------------------------------

def test_criterion_03_row_layout():
    worst = 0.0
    for m in (1, 2, 3, 4):
        for seed in range(3):
            pts = gen_random_cloud(29 + seed, 2, seed=100 * m + seed)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OvercompleteWarning)
                V = build_fourier_matrix(pts, ModeSpec.fourier(m, 2), "paper").entries
            c = math.sqrt(2.0 / pts.n)
            for j in range(m * m):
                for k in range(pts.n):
                    p0, p1 = pts.coords[k]
                    expect = c * np.exp(-2j * math.pi * ((j % m) * p0 + (j // m) * p1))
                    worst = max(worst, abs(V[j, k] - expect))
    ok = worst < 1e-14
    record(3, ok, f"entry-wise max err {worst:.2e} (tol 1e-14)")
    assert ok


# 4 -------------------------------------------------------------------------

def test_criterion_04_unitarity():
    rng = np.random.default_rng(4)
    gram, trip = 0.0, 0.0
    for n in (8, 64, 256, 1024):
        pts = gen_equispaced_1d(n)
        V = build_fourier_matrix(pts, ModeSpec.fourier(n), "unitary")
        gram = max(gram, np.max(np.abs(V.entries @ V.adjoint_entries - np.eye(n))))
        x = _crand(rng, n, 2)
        coeffs = CoeffVector(V.entries @ x, V.mode_spec)
        trip = max(trip, np.max(np.abs(nudft_adjoint(V, coeffs).values - x)))
    ok = gram < 1e-12 and trip < 1e-12
    record(4, ok, f"max |V V^H - I| {gram:.2e}, round-trip err {trip:.2e} (tol 1e-12)")
    assert ok


# 5 -------------------------------------------------------------------------

def test_criterion_05_lattice():
    rng = np.random.default_rng(5)
    worst = 0.0
    counts_ok = True
    for n0, n1, m, focus, sharp in ((16, 12, 4, (0.5, 0.5), 2.0), (33, 20, 6, (0.2, 0.7), 3.5),
                                    (40, 41, 8, (0.8, 0.3), 1.0)):
        ax = gen_lattice_tanh_2d(n0, n1, focus, sharp)
        fac = build_lattice_factors(ax, m, "unitary")
        counts_ok &= fac.entry_count == m * (n0 + n1)
        x = rng.normal(size=(n0, n1))
        V = build_fourier_matrix(lattice_points(ax), ModeSpec.fourier(m, 2), "unitary").entries
        general = (V @ x.ravel(order="F")).reshape(m, m, order="F")
        worst = max(worst, np.max(np.abs(lattice_forward(fac, x) - general)))
    ok = worst < 1e-12 and counts_ok
    record(5, ok, f"max err {worst:.2e} (tol 1e-12), stored entries = m(N0+N1): {counts_ok}")
    assert ok


# 6 -------------------------------------------------------------------------

def test_criterion_06_spherical():
    # (a) index map
    bijective = True
    for l_max in range(1, 17):
        pairs = set()
        for j in range(l_max * l_max):
            ix = sh_index_from_flat(j)
            l = math.floor(math.sqrt(j))
            bijective &= ix.l == l and ix.m == j - (l * l + l) and flat_from_sh(ix.l, ix.m) == j
            pairs.add((ix.l, ix.m))
        bijective &= pairs == {(l, m) for l in range(l_max) for m in range(-l, l + 1)}

    # (b) projection of each sampled harmonic, l_max = 8, bandwidth-16 grid
    l_max, n_theta = 8, 32
    grid = dh_grid(n_theta)
    w = dh_quadrature_weights(n_theta).weights
    V = build_sh_matrix(grid, l_max).entries
    unit_err, cross = 0.0, 0.0
    for j in range(l_max * l_max):
        ix = sh_index_from_flat(j)
        c = V @ (w * harmonic(ix.l, ix.m, grid.theta, grid.phi))
        unit_err = max(unit_err, abs(c[j] - 1.0))
        c[j] = 0.0
        cross = max(cross, np.max(np.abs(c)))

    # (c) synthesize then project
    a = _crand(np.random.default_rng(6), l_max * l_max, 1)
    back = V @ (w[:, None] * (V.conj().T @ a))
    trip = np.max(np.abs(back - a))

    ok = bijective and unit_err < 1e-8 and cross < 1e-8 and trip < 1e-8
    record(6, ok, f"(a) bijective {bijective}; (b) unit err {unit_err:.1e}, cross {cross:.1e}; "
                  f"(c) round trip {trip:.1e} (tol 1e-8)")
    assert ok


# 7 -------------------------------------------------------------------------

def test_criterion_07_gradients():
    t0 = time.perf_counter()
    cfg = ModelConfig(width=8, n_layers=4, modes=17, loss="l2", seed=7)
    pts = gen_contracting_expanding_1d(128, 0.5, 1.01)
    data = make_task("derivative", pts, 4, max_freq=8, seed=7)
    rep = finite_difference_check(cfg, init_params(cfg), data.inputs, data.targets, pts,
                                  n_probes=120, eps=1e-6, seed=7)
    resolved = rep.resolvable(1e-5)
    worst = rep.max_rel_error(1e-5)
    below = rep.unresolvable(1e-5)
    r_probes = sum(1 for p in resolved if ".R" in p.name)
    elapsed = time.perf_counter() - t0
    ok = rep.passed(1e-5, min_probes=50) and elapsed < 30.0
    record(7, ok, f"{len(resolved)} probes above the float64 difference floor ({r_probes} on spectral "
                  f"weights), max rel err {worst:.2e} (tol 1e-5); {len(below)} smaller gradients within "
                  f"abs {rep.max_unresolved_abs_error(1e-5):.1e} <= floor {rep.noise:.1e}; "
                  f"{elapsed:.1f} s (limit 30 s)")
    assert ok


# 8 and 10 ------------------------------------------------------------------

TRAIN_N = 128


@pytest.fixture(scope="module")
def derivative_run(tmp_path_factory):
    """Train the derivative model once through the CLI; reused by criterion 10."""
    out = tmp_path_factory.mktemp("derivative")
    t0 = time.perf_counter()
    code = cli.main(["train", "--task", "derivative", "--n", str(TRAIN_N), "--modes", "17",
                     "--epochs", "200", "--out", str(out), "--log-every", "50"])
    elapsed = time.perf_counter() - t0
    assert code == 0
    history = (out / "history.csv").read_text().splitlines()
    final = float(history[-1].split(",")[2])
    config, params = load_checkpoint(out / "model.ckpt")
    return {"final": final, "seconds": elapsed, "config": config, "params": params, "epochs": len(history) - 1}


def test_criterion_08_operator_learning(derivative_run):
    pts = gen_contracting_expanding_1d(TRAIN_N, 0.5, 1.01)
    cfg = ModelConfig(modes=17, epochs=200, seed=0)
    t0 = time.perf_counter()
    ident = train(cfg, make_task("identity", pts, 500, 8, seed=1), make_task("identity", pts, 200, 8, seed=2))
    id_seconds = time.perf_counter() - t0
    total = derivative_run["seconds"] + id_seconds
    d_err, i_err = derivative_run["final"], ident.final_test_rel_l1
    ok = d_err < 0.05 and i_err < 0.01 and total < 300.0 and derivative_run["epochs"] == 200
    record(8, ok, f"derivative rel-L1 {d_err:.4%} (tol 5%), identity rel-L1 {i_err:.4%} (tol 1%), "
                  f"{total:.0f} s total (limit 300 s)")
    assert ok


def unseen_cloud(n):
    # off-center family with the same end-to-end gap growth as the training cloud
    return gen_contracting_expanding_1d(n, 0.47, 1.01 ** ((TRAIN_N - 1) / (n - 1)))


def test_criterion_10_cross_resolution(derivative_run):
    cfg, params = derivative_run["config"], derivative_run["params"]
    errs = {}
    for n in (64, 128, 256, 512):
        data = make_task("derivative", unseen_cloud(n), 100, 8, seed=77)
        errs[n] = evaluate(cfg, params, data)
    worst = max(e / errs[128] for e in errs.values())
    ok = worst <= 2.0
    shown = ", ".join(f"N={n}: {e:.3%}" for n, e in errs.items())
    record(10, ok, f"{shown}; worst ratio to N=128 {worst:.2f} (limit 2)")
    assert ok


# 9 -------------------------------------------------------------------------

def test_criterion_09_scaling(tmp_path):
    flops = estimate_flops(1024, 16, 1)
    by_n = sweep_points([2**k for k in range(10, 16)], 16, reps=15, warmup=3, threads=1)
    slope = fit_scaling_exponent(by_n, "N")
    m_list = list(range(8, 33, 2))
    by_m = sweep_modes(2**14, m_list, reps=15, warmup=3, threads=1)
    lin = linear_fit([r.m_total for r in by_m], [r.apply_ns_median for r in by_m])
    # wall-clock crossover against the FFT: reported, never asserted
    csv_path = tmp_path / "sweep.csv"
    recs = run_mode_sweep(2**14, m_list, ("dse", "fft_truncated"), csv_path, reps=7, warmup=2)
    cross = crossover_modes(recs)
    ok = 0.8 <= slope.slope <= 1.3 and lin.r_squared > 0.9 and flops == 61440
    record(9, ok, f"slope vs N {slope.slope:.3f} +/- {slope.stderr:.3f} (range [0.8, 1.3]), "
                  f"time-vs-m R^2 {lin.r_squared:.4f} (> 0.9), flops(1024, 16) = {flops:.0f}; "
                  f"dse faster than fft up to m = {cross} (reported only)")
    assert ok
