"""Numpy implementations of the hot loops in ``_kernels.pyx``."""
import numpy as np


def build_exponential(freqs, coords, scale):
    freqs = np.asarray(freqs, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.float64)
    if freqs.shape[1] != coords.shape[1]:
        raise ValueError("freqs and coords disagree on dimension")
    # Accumulate the phase dimension by dimension, in the same order as the compiled loop.
    phase = np.zeros((freqs.shape[0], coords.shape[0]))
    for d in range(freqs.shape[1]):
        phase += np.multiply.outer(freqs[:, d], coords[:, d])
    phase *= -2.0 * np.pi
    out = np.empty(phase.shape, dtype=np.complex128)
    out.real = scale * np.cos(phase)
    out.imag = scale * np.sin(phase)
    return out


def matvec(mat, x):
    if x.shape[0] != mat.shape[1]:
        raise ValueError("inner dimensions differ")
    return mat @ x


def rmatvec(mat, y):
    if y.shape[0] != mat.shape[0]:
        raise ValueError("row counts differ")
    return mat.conj().T @ y


def fft_butterflies(x, twiddles):
    n = x.shape[0]
    size = 2
    while size <= n:
        half = size // 2
        w = twiddles[:: n // size][:half]
        blocks = x.reshape(n // size, size)
        u = blocks[:, :half].copy()
        v = blocks[:, half:] * w
        blocks[:, :half] = u + v
        blocks[:, half:] = u - v
        size *= 2


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data):
    h = _FNV_OFFSET
    for byte in bytes(data):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h
