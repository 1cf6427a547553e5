# cython: language_level=3
"""Compiled hot loops: exponential matrix fill, dense complex products, FFT butterflies.

Every function here has a numpy twin in ``_pykernels`` with the same
signature; ``dse._backend`` picks one at import time.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()


def build_exponential(const double[:, ::1] freqs, const double[:, ::1] coords, double scale):
    """Fill ``scale * exp(-2 pi i freqs @ coords.T)`` row by row."""
    cdef Py_ssize_t m = freqs.shape[0]
    cdef Py_ssize_t n = coords.shape[0]
    cdef Py_ssize_t dim = freqs.shape[1]
    if coords.shape[1] != dim:
        raise ValueError("freqs and coords disagree on dimension")
    out = np.empty((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t j, k, d
    cdef double phase
    with nogil:
        for j in range(m):
            for k in range(n):
                phase = 0.0
                for d in range(dim):
                    phase = phase + freqs[j, d] * coords[k, d]
                phase = -2.0 * M_PI * phase
                o[j, k] = scale * cos(phase) + 1j * (scale * sin(phase))
    return out


def matvec(const double complex[:, ::1] mat, const double complex[:, ::1] x):
    """``mat @ x`` for a (m, N) matrix and (N, C) block."""
    cdef Py_ssize_t m = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef Py_ssize_t c = x.shape[1]
    if x.shape[0] != n:
        raise ValueError("inner dimensions differ")
    out = np.zeros((m, c), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t j, k, ch
    cdef double ar, ai, xr, xi, sr, si
    with nogil:
        if c == 1:
            for j in range(m):
                sr = 0.0
                si = 0.0
                for k in range(n):
                    ar = mat[j, k].real
                    ai = mat[j, k].imag
                    xr = x[k, 0].real
                    xi = x[k, 0].imag
                    sr = sr + (ar * xr - ai * xi)
                    si = si + (ar * xi + ai * xr)
                o[j, 0] = sr + 1j * si
        else:
            for j in range(m):
                for k in range(n):
                    ar = mat[j, k].real
                    ai = mat[j, k].imag
                    for ch in range(c):
                        xr = x[k, ch].real
                        xi = x[k, ch].imag
                        o[j, ch] = o[j, ch] + ((ar * xr - ai * xi) + 1j * (ar * xi + ai * xr))
    return out


def rmatvec(const double complex[:, ::1] mat, const double complex[:, ::1] y):
    """``conj(mat).T @ y`` without forming the transpose."""
    cdef Py_ssize_t m = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef Py_ssize_t c = y.shape[1]
    if y.shape[0] != m:
        raise ValueError("row counts differ")
    out = np.zeros((n, c), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t j, k, ch
    cdef double ar, ai, yr, yi
    with nogil:
        for j in range(m):
            for k in range(n):
                ar = mat[j, k].real
                ai = -mat[j, k].imag
                for ch in range(c):
                    yr = y[j, ch].real
                    yi = y[j, ch].imag
                    o[k, ch] = o[k, ch] + ((ar * yr - ai * yi) + 1j * (ar * yi + ai * yr))
    return out


def fft_butterflies(double complex[::1] x, const double complex[::1] twiddles):
    """In-place decimation-in-time stages on bit-reversed input.

    ``twiddles[t] = exp(-2 pi i t / N)`` for ``t < N/2``.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t size = 2, half, stride, start, t
    cdef double complex u, v
    with nogil:
        while size <= n:
            half = size // 2
            stride = n // size
            start = 0
            while start < n:
                for t in range(half):
                    u = x[start + t]
                    v = x[start + t + half] * twiddles[t * stride]
                    x[start + t] = u + v
                    x[start + t + half] = u - v
                start = start + size
            size = size * 2


def fnv1a64(const unsigned char[::1] data):
    """64-bit FNV-1a over a byte buffer."""
    cdef unsigned long long h = 0xcbf29ce484222325ULL
    cdef Py_ssize_t i
    with nogil:
        for i in range(data.shape[0]):
            h = (h ^ data[i]) * 0x100000001b3ULL
    return h
