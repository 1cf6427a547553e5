"""Timing harness: direct evaluation vs. radix-2 FFT vs. naive DFT.

Timings use ``time.perf_counter_ns``; each record keeps the median over
``reps`` timed calls after ``warmup`` untimed ones. Matrix construction and
application are timed separately. Nothing here asserts a crossover between
methods; that is hardware-dependent and only reported.
"""
from __future__ import annotations

import csv
import math
import os
import platform
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy import stats
from threadpoolctl import threadpool_limits

from dse import _backend
from dse.core import ModeSpec, PointSet
from dse.errors import ConfigError, FitError
from dse.fftref import _plan, dft_naive, fft_radix2
from dse.nudft import build_fourier_matrix, build_lattice_factors, estimate_flops, lattice_forward

METHODS = ("dse", "fft_truncated", "dft_naive", "lattice_dse")
CSV_COLUMNS = (
    "method", "N", "m_total", "D", "apply_ns_median", "build_ns_median", "flops_model",
    "speedup_vs_fft", "reps", "backend", "precision", "timestamp", "machine_tag", "notes",
)


@dataclass
class BenchRecord:
    method: str
    n: int
    m_total: int
    dim: int
    reps: int
    apply_ns_median: float
    build_ns_median: float
    flops_model: float
    timestamp: str
    machine_tag: str
    backend: str = ""
    precision: str = "float64"
    notes: str = ""
    speedup_vs_fft: float = float("nan")
    output: object = field(default=None, repr=False, compare=False)

    def as_row(self):
        return {
            "method": self.method,
            "N": self.n,
            "m_total": self.m_total,
            "D": self.dim,
            "apply_ns_median": f"{self.apply_ns_median:.17g}",
            "build_ns_median": f"{self.build_ns_median:.17g}",
            "flops_model": f"{self.flops_model:.17g}",
            "speedup_vs_fft": f"{self.speedup_vs_fft:.17g}",
            "reps": self.reps,
            "backend": self.backend,
            "precision": self.precision,
            "timestamp": self.timestamp,
            "machine_tag": self.machine_tag,
            "notes": self.notes,
        }


@contextmanager
def _thread_limit(threads):
    with threadpool_limits(limits=threads):
        yield


def default_machine_tag(threads=1):
    return f"{platform.machine()}-{platform.python_implementation()}{platform.python_version()}-threads{threads}"


MIN_SAMPLE_NS = 1_000_000


def _calibrate(fn, min_sample_ns):
    """Calls per timed sample so that one sample lasts at least ``min_sample_ns``."""
    if min_sample_ns <= 0:
        return 1
    inner = 1
    while True:
        t0 = time.perf_counter_ns()
        for _ in range(inner):
            fn()
        if time.perf_counter_ns() - t0 >= min_sample_ns or inner >= 1 << 20:
            return inner
        inner *= 2


def _sample_ns(fn, inner):
    t0 = time.perf_counter_ns()
    for _ in range(inner):
        fn()
    return (time.perf_counter_ns() - t0) / inner


def _median_ns(fn, reps, warmup, min_sample_ns=0):
    """Median per-call time over ``reps`` samples after ``warmup`` untimed calls.

    Short calls are repeated ``inner`` times per sample (calibrated once) so
    that timer resolution and scheduler jitter stay small relative to the
    sample.
    """
    out = None
    for _ in range(warmup):
        out = fn()
    inner = _calibrate(fn, min_sample_ns)
    samples = [_sample_ns(fn, inner) for _ in range(reps)]
    out = fn()
    return statistics.median(samples), out


def _is_equispaced(coords):
    n = coords.shape[0]
    return coords.shape[1] == 1 and np.max(np.abs(coords[:, 0] - np.arange(n) / n)) < 1e-12


def time_transform(method, points, modes, reps=7, warmup=3, signal=None, backend=None,
                   precision="float64", threads=1, machine_tag=None,
                   min_sample_ns=MIN_SAMPLE_NS) -> BenchRecord:
    """Time one method on one configuration.

    ``points`` is a PointSet, or for ``lattice_dse`` a sequence of per-axis
    coordinate arrays. ``modes`` is a ModeSpec (or an int for 1-D). The
    record's ``output`` holds the transform result of an extra call made
    after timing. ``min_sample_ns`` sets the calibrated sample length for
    the apply timing (0 disables repetition inside a sample).
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")
    if reps < 5:
        raise ConfigError("at least 5 timed repetitions are required")
    if precision not in ("float64", "float32"):
        raise ConfigError("precision must be float64 or float32")
    kern = _backend.get(backend)
    backend_name = backend or _backend.BACKEND
    notes = ""
    if isinstance(modes, (int, np.integer)):
        dim = len(points) if method == "lattice_dse" else points.dim
        modes = ModeSpec.fourier(int(modes), dim)
    ctype = np.complex128 if precision == "float64" else np.complex64
    rng = np.random.default_rng(0)

    if method == "lattice_dse":
        axes = [np.asarray(a, dtype=np.float64) for a in points]
        shape = tuple(a.size for a in axes)
        n, dim = int(np.prod(shape)), len(axes)
        x = signal if signal is not None else rng.normal(size=shape)
        build_ns, factors = _median_ns(
            lambda: build_lattice_factors(axes, modes.modes_per_dim, "unitary"), reps, warmup)
        apply_ns, out = _median_ns(lambda: lattice_forward(factors, x), reps, warmup, min_sample_ns)
        m = modes.modes_per_dim[0]
        flops = 8.0 * m * n + 8.0 * m * m * shape[-1]
        backend_name = "numpy"
    else:
        n, dim = points.n, points.dim
        x = signal if signal is not None else rng.normal(size=n)
        x = np.ascontiguousarray(np.asarray(x, dtype=np.complex128).reshape(n, -1))
        if method == "dse":
            build_ns, mat = _median_ns(lambda: build_fourier_matrix(points, modes, "none"), reps, warmup)
            if precision == "float64":
                entries = mat.entries
                apply_ns, out = _median_ns(lambda: kern.matvec(entries, x), reps, warmup, min_sample_ns)
            else:
                entries = mat.entries.astype(ctype)
                x32 = x.astype(ctype)
                apply_ns, out = _median_ns(lambda: entries @ x32, reps, warmup, min_sample_ns)
                backend_name = "numpy"
            flops = estimate_flops(n, modes.m_total, dim)
        elif method == "fft_truncated":
            if not _is_equispaced(points.coords):
                raise ConfigError("fft_truncated needs equispaced 1-D points")
            size = n
            if n & (n - 1):
                size = 1 << (n - 1).bit_length()
                notes = f"zero-padded to {size}"
            sig = np.zeros(size, dtype=np.complex128)
            sig[:n] = x[:, 0]
            m = min(modes.m_total, size)

            def build():
                _plan.cache_clear()
                return _plan(size)

            build_ns, _ = _median_ns(build, reps, warmup)
            apply_ns, out = _median_ns(lambda: fft_radix2(sig, backend=backend)[:m], reps, warmup, min_sample_ns)
            flops = 5.0 * size * math.log2(size)
        else:
            if not _is_equispaced(points.coords):
                raise ConfigError("dft_naive timing needs equispaced 1-D points")
            build_ns = 0.0
            apply_ns, out = _median_ns(lambda: dft_naive(x[:, 0]), reps, warmup, min_sample_ns)
            flops = 8.0 * n * n
            backend_name = "python"

    return BenchRecord(
        method=method, n=n, m_total=modes.m_total, dim=dim, reps=reps,
        apply_ns_median=float(apply_ns), build_ns_median=float(build_ns), flops_model=float(flops),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        machine_tag=machine_tag or default_machine_tag(threads), backend=backend_name,
        precision=precision, notes=notes, output=out,
    )


def append_csv(path, records) -> None:
    """Append rows, writing the header only when the file is new or empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if fresh:
            writer.writeheader()
        for rec in records:
            writer.writerow(rec.as_row())


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def run_mode_sweep(n, m_list, methods=("dse", "fft_truncated"), out_path=None, reps=7, warmup=3,
                   backend=None, precision="float64", threads=1, machine_tag=None):
    """Time every method at every mode count on ``n`` equispaced 1-D points.

    Returns the records and, if ``out_path`` is given, appends them to that
    CSV. When ``fft_truncated`` is in the sweep each row carries
    ``speedup_vs_fft`` (FFT apply time over this row's apply time).
    """
    m_list = list(m_list)
    if not m_list:
        raise ConfigError("mode list must not be empty")
    for method in methods:
        if method not in METHODS or method == "lattice_dse":
            raise ConfigError(f"method {method!r} is not available in a 1-D sweep")
    if out_path is not None:
        parent = Path(out_path).parent
        if not parent.exists() or not os.access(parent, os.W_OK):
            raise OSError(f"cannot write bench CSV to {out_path}")
    points = PointSet.cartesian(np.arange(n) / n)
    signal = np.random.default_rng(0).normal(size=n)
    records = []
    with _thread_limit(threads):
        for m in m_list:
            spec = ModeSpec.fourier(int(m), 1)
            row = {}
            for method in methods:
                row[method] = time_transform(method, points, spec, reps, warmup, signal, backend,
                                             precision, threads, machine_tag)
            if "fft_truncated" in row:
                ref = row["fft_truncated"].apply_ns_median
                for rec in row.values():
                    rec.speedup_vs_fft = ref / rec.apply_ns_median if rec.apply_ns_median else float("nan")
            records.extend(row.values())
    if out_path is not None:
        append_csv(out_path, records)
    return records


def crossover_modes(records):
    """Largest mode count at which dse applied faster than the FFT, or None."""
    faster = [r.m_total for r in records if r.method == "dse" and r.speedup_vs_fft > 1.0]
    return max(faster) if faster else None


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    stderr: float
    intercept: float
    r_squared: float


def fit_scaling_exponent(records, axis="N", method=None) -> ScalingFit:
    """Least-squares slope of log(apply time) against log(N) or log(m)."""
    if method is not None:
        records = [r for r in records if r.method == method]
    if axis not in ("N", "m"):
        raise FitError("axis must be 'N' or 'm'")
    xs = np.array([r.n if axis == "N" else r.m_total for r in records], dtype=np.float64)
    ys = np.array([r.apply_ns_median for r in records], dtype=np.float64)
    if xs.size < 4:
        raise FitError(f"need at least 4 records, got {xs.size}")
    if xs.max() < 8 * xs.min():
        raise FitError(f"{axis} spans only {xs.max() / xs.min():.3g}x; need 8x")
    fit = stats.linregress(np.log(xs), np.log(ys))
    return ScalingFit(float(fit.slope), float(fit.stderr), float(fit.intercept), float(fit.rvalue**2))


def linear_fit(xs, ys) -> ScalingFit:
    """Ordinary least squares in linear space (used for time vs. m)."""
    fit = stats.linregress(np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64))
    return ScalingFit(float(fit.slope), float(fit.stderr), float(fit.intercept), float(fit.rvalue**2))


def _interleaved_medians(fns, reps, warmup, min_sample_ns):
    """Median per-call time of each function, timed in interleaved rounds.

    Every function is sampled once per round, so slow drifts in machine load
    hit all of them alike instead of biasing whichever ran during a burst.
    """
    if reps < 5:
        raise ConfigError("at least 5 timed repetitions are required")
    for fn in fns:
        for _ in range(warmup):
            fn()
    inner = [_calibrate(fn, min_sample_ns) for fn in fns]
    samples = [[] for _ in fns]
    for _ in range(reps):
        for fn, k, acc in zip(fns, inner, samples):
            acc.append(_sample_ns(fn, k))
    return [float(statistics.median(acc)) for acc in samples]


def _dse_sweep(configs, reps, warmup, backend, threads, min_sample_ns):
    kern = _backend.get(backend)
    built = []
    with _thread_limit(threads):
        for pts, spec in configs:
            build_ns, mat = _median_ns(lambda: build_fourier_matrix(pts, spec, "none"), 5, 1)
            x = np.random.default_rng(0).normal(size=(pts.n, 1)).astype(np.complex128)
            built.append((pts, spec, build_ns, lambda e=mat.entries, v=x: kern.matvec(e, v)))
        medians = _interleaved_medians([b[3] for b in built], reps, warmup, min_sample_ns)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return [
        BenchRecord(method="dse", n=pts.n, m_total=spec.m_total, dim=pts.dim, reps=reps,
                    apply_ns_median=apply_ns, build_ns_median=float(build_ns),
                    flops_model=estimate_flops(pts.n, spec.m_total, pts.dim), timestamp=stamp,
                    machine_tag=default_machine_tag(threads), backend=backend or _backend.BACKEND,
                    notes="interleaved", output=fn())
        for (pts, spec, build_ns, fn), apply_ns in zip(built, medians)
    ]


def sweep_points(n_list, m, reps=7, warmup=3, backend=None, threads=1, min_sample_ns=MIN_SAMPLE_NS):
    """dse apply timings at fixed ``m`` over point counts (random 1-D clouds), interleaved."""
    from dse.distributions import gen_random_cloud

    configs = [(gen_random_cloud(int(n), 1, seed=int(n)), ModeSpec.fourier(m, 1)) for n in n_list]
    return _dse_sweep(configs, reps, warmup, backend, threads, min_sample_ns)


def sweep_modes(n, m_list, reps=7, warmup=3, backend=None, threads=1, min_sample_ns=MIN_SAMPLE_NS):
    """dse apply timings at fixed ``n`` equispaced points over mode counts, interleaved."""
    pts = PointSet.cartesian(np.arange(n) / n)
    return _dse_sweep([(pts, ModeSpec.fourier(int(m), 1)) for m in m_list], reps, warmup, backend,
                      threads, min_sample_ns)


def compare_backends(n_list=(1024, 4096, 16384), m=16, reps=7, warmup=3):
    """dse and FFT timings for every importable backend, for side-by-side reports."""
    records = []
    for name in _backend.available():
        for n in n_list:
            pts = PointSet.cartesian(np.arange(n) / n)
            spec = ModeSpec.fourier(m, 1)
            for method in ("dse", "fft_truncated"):
                records.append(time_transform(method, pts, spec, reps, warmup, backend=name))
    return records
