"""Reference transforms: iterative radix-2 FFT and the literal O(N^2) DFT.

Both use the unnormalized forward convention
``X_k = sum_n x_n exp(-2 pi i k n / N)`` and return natural frequency order.
"""
import cmath
import math
from functools import lru_cache

import numpy as np

from dse._backend import get
from dse.errors import SizeError


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


@lru_cache(maxsize=32)
def _plan(n):
    """Bit-reversal permutation and twiddle table for size ``n``."""
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = np.exp(-2j * np.pi * np.arange(max(n // 2, 1)) / n)
    rev.setflags(write=False)
    twiddles.setflags(write=False)
    return rev, twiddles


def fft_radix2(signal, backend=None) -> np.ndarray:
    """Unnormalized forward DFT of a power-of-two length signal.

    Decimation in time: the input is permuted into bit-reversed order, then
    log2(N) butterfly stages run in place.
    """
    x = np.asarray(signal, dtype=np.complex128).reshape(-1)
    n = x.size
    if not _is_power_of_two(n):
        raise SizeError(f"radix-2 FFT needs a power-of-two length, got {n}")
    rev, twiddles = _plan(n)
    work = np.ascontiguousarray(x[rev])
    get(backend).fft_butterflies(work, twiddles)
    return work


def dft_naive(signal) -> np.ndarray:
    """Double-loop DFT. O(N^2); for testing only."""
    x = [complex(v) for v in np.asarray(signal).reshape(-1)]
    n = len(x)
    # exact integer reduction of k*t keeps every angle in [0, 2 pi)
    roots = [cmath.exp(-2j * math.pi * r / n) for r in range(n)]
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for t, xt in enumerate(x):
            acc += xt * roots[(k * t) % n]
        out[k] = acc
    return out


def fft_truncated(signal, m, backend=None) -> np.ndarray:
    """First ``m`` outputs of :func:`fft_radix2`.

    The full transform is computed regardless of ``m``.
    """
    n = np.asarray(signal).size
    if m > n or m < 1:
        raise SizeError(f"cannot keep {m} of {n} FFT outputs")
    return fft_radix2(signal, backend=backend)[:m]
