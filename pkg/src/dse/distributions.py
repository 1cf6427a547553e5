"""Point distributions and synthetic band-limited fields.

Randomness comes from :class:`SplitMix64`, a counter-based generator whose
output ``i`` (0-based) for seed ``s`` is

    mix(s + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)

with the standard SplitMix64 finalizer. Uniform doubles take the top 53
bits; normals use Box-Muller on consecutive uniform pairs. Draw order is
documented per generator so other implementations can reproduce clouds
exactly.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from dse.core import Field, PointSet
from dse.errors import ConfigError

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * math.pi


def splitmix64_mix(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Sequential view over the counter-based SplitMix64 stream."""

    def __init__(self, seed: int):
        self.seed = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)
        self.counter = 0

    def next_uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return splitmix64_mix(self.seed + idx * _GAMMA)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1)."""
        return (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        """``n`` standard normals; consumes ``2 * ceil(n / 2)`` uniforms."""
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        z = np.column_stack([r * np.cos(_TWO_PI * u[:, 1]), r * np.sin(_TWO_PI * u[:, 1])])
        return z.reshape(-1)[:n]


KINDS = ("equispaced", "contracting_expanding", "random_uniform", "lattice_tanh", "sphere_uniform")


@dataclass(frozen=True)
class DistributionConfig:
    kind: str
    n: int = 0
    n1: int = 0
    dim: int = 1
    seed: int = 0
    center: float = 0.5
    ratio: float = 1.05
    focus: float = 0.5
    sharpness: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown distribution kind {self.kind!r}; choose from {KINDS}")

    def as_dict(self):
        return asdict(self)


def gen_equispaced_1d(n: int) -> PointSet:
    if n < 1:
        raise ConfigError("need at least one point")
    return PointSet.cartesian(np.arange(n, dtype=np.float64) / n)


def gen_contracting_expanding_1d(n: int, center: float = 0.5, ratio: float = 1.05) -> PointSet:
    """Gaps grow by ``ratio`` per step away from ``center`` on both sides.

    ``round(center * (n - 1))`` points go left of the center point and the
    rest right; the set is then mapped affinely onto [0, 1], so both
    endpoints are included and the center lands near (not exactly at)
    ``center`` unless the sides are balanced.
    """
    if n < 3:
        raise ConfigError("contracting-expanding needs at least 3 points")
    if not 0.0 <= center <= 1.0:
        raise ConfigError("center must lie in [0, 1]")
    if not ratio > 1.0:
        raise ConfigError(f"growth ratio must exceed 1, got {ratio}")
    n_left = int(round(center * (n - 1)))
    n_right = n - 1 - n_left
    left = np.cumsum(ratio ** np.arange(n_left, dtype=np.float64))
    right = np.cumsum(ratio ** np.arange(n_right, dtype=np.float64))
    raw = np.concatenate([-left[::-1], [0.0], right])
    lo, hi = raw[0], raw[-1]
    pts = (raw - lo) / (hi - lo)
    pts[0], pts[-1] = 0.0, 1.0
    if np.any(np.diff(pts) <= 0.0):
        raise ConfigError(f"ratio {ratio} is too large for {n} points: central points coincide in float64")
    return PointSet.cartesian(np.clip(pts, 0.0, 1.0))


def tanh_warp_axis(n: int, focus: float = 0.5, sharpness: float = 2.0) -> np.ndarray:
    """``n`` sorted coordinates on [0, 1], denser near ``focus``.

    The equispaced grid ``u`` is pushed through the inverse of a tanh
    profile: ``x = focus + artanh(t0 + u (t1 - t0)) / s`` with
    ``t0 = tanh(-s focus)``, ``t1 = tanh(s (1 - focus))``. The map is the
    identity as ``s -> 0``.
    """
    if n < 2:
        raise ConfigError("lattice axes need at least 2 points")
    if sharpness < 0:
        raise ConfigError("sharpness must be non-negative")
    u = np.linspace(0.0, 1.0, n)
    if sharpness < 1e-8:
        return u
    s = float(sharpness)
    t0, t1 = math.tanh(-s * focus), math.tanh(s * (1.0 - focus))
    x = focus + np.arctanh(t0 + u * (t1 - t0)) / s
    x[0], x[-1] = 0.0, 1.0
    return np.clip(x, 0.0, 1.0)


def gen_lattice_tanh_2d(n0: int, n1: int, focus=0.5, sharpness=2.0):
    """Per-axis coordinate lists for a tanh-warped 2-D lattice."""
    f0, f1 = (focus, focus) if np.isscalar(focus) else focus
    s0, s1 = (sharpness, sharpness) if np.isscalar(sharpness) else sharpness
    return tanh_warp_axis(n0, f0, s0), tanh_warp_axis(n1, f1, s1)


def gen_random_cloud(n: int, dim: int, seed: int) -> PointSet:
    """i.i.d. uniform points in [0, 1)^D, drawn row-major."""
    if n < 1 or dim < 1:
        raise ConfigError("need n >= 1 and dim >= 1")
    return PointSet.cartesian(SplitMix64(seed).uniform(n * dim).reshape(n, dim))


def gen_sphere_uniform(n: int, seed: int) -> PointSet:
    """Uniform on the sphere; per point one draw for phi then one for cos(theta)."""
    if n < 1:
        raise ConfigError("need at least one point")
    u = SplitMix64(seed).uniform(2 * n).reshape(n, 2)
    phi = np.minimum(_TWO_PI * u[:, 0], np.nextafter(_TWO_PI, 0.0))
    theta = np.arccos(np.clip(1.0 - 2.0 * u[:, 1], -1.0, 1.0))
    return PointSet.spherical(theta, phi)


@dataclass(frozen=True, eq=False)
class BandLimitedField:
    """A real field ``sum_q a_q exp(2 pi i q . p)`` with its coefficients kept."""

    field: Field
    frequencies: np.ndarray  # (M, D) integers
    coefficients: np.ndarray  # (M, C) complex, Hermitian symmetric
    max_freq: int
    meta: dict = field(default_factory=dict)

    def evaluate(self, points: PointSet) -> np.ndarray:
        return _synthesize(self.frequencies, self.coefficients, points.coords)

    def derivative(self, points: PointSet, axis: int = 0) -> np.ndarray:
        scaled = self.coefficients * (2j * math.pi * self.frequencies[:, axis])[:, None]
        return _synthesize(self.frequencies, scaled, points.coords)


def _synthesize(freqs, coeffs, coords):
    phase = np.zeros((coords.shape[0], freqs.shape[0]))
    for d in range(coords.shape[1]):
        phase += np.multiply.outer(coords[:, d], freqs[:, d])
    return np.exp(2j * math.pi * phase) @ coeffs


def band_limited_frequencies(max_freq: int, dim: int) -> np.ndarray:
    """All integer vectors with every component in [-max_freq, max_freq], axis 0 fastest."""
    axis = np.arange(-max_freq, max_freq + 1)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.column_stack([g.ravel(order="F") for g in grids]).astype(np.int64)


def gen_random_band_limited_field(points: PointSet, max_freq: int, channels: int = 1,
                                  seed: int = 0) -> BandLimitedField:
    """Random real field with known Fourier coefficients.

    Raw coefficients are complex Gaussians (real part then imaginary part,
    channel fastest, frequencies in :func:`band_limited_frequencies` order);
    they are then averaged with the conjugate of their mirror frequency so
    that ``a_{-q} = conj(a_q)`` and the field is real.
    """
    if max_freq < 0:
        raise ConfigError("max_freq must be non-negative")
    freqs = band_limited_frequencies(max_freq, points.dim)
    m = freqs.shape[0]
    z = SplitMix64(seed).normal(2 * m * channels).reshape(m, channels, 2)
    raw = (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    # the frequency list is symmetric: row i mirrors to row m - 1 - i
    coeffs = 0.5 * (raw + np.conj(raw[::-1]))
    values = _synthesize(freqs, coeffs, points.coords)
    meta = {"max_freq": max_freq, "channels": channels, "seed": seed}
    return BandLimitedField(Field.on(points, values), freqs, coeffs, max_freq, meta)


def generate(config: DistributionConfig):
    """Dispatch on ``config.kind``; lattices return a PointSet of the flattened lattice."""
    kind = config.kind
    if kind == "equispaced":
        if config.dim == 1:
            return gen_equispaced_1d(config.n)
        axis = np.arange(config.n) / config.n
        from dse.nudft import lattice_points
        return lattice_points([axis] * config.dim)
    if kind == "contracting_expanding":
        return gen_contracting_expanding_1d(config.n, config.center, config.ratio)
    if kind == "random_uniform":
        return gen_random_cloud(config.n, config.dim, config.seed)
    if kind == "lattice_tanh":
        from dse.nudft import lattice_points
        n1 = config.n1 or config.n
        return lattice_points(gen_lattice_tanh_2d(config.n, n1, config.focus, config.sharpness))
    return gen_sphere_uniform(config.n, config.seed)
