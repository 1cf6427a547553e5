"""The compiled kernels and the numpy fallback must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from dse import _backend, _pykernels
from dse.fftref import _plan

needs_compiled = pytest.mark.skipif("compiled" not in _backend.available(), reason="extension not built")


@needs_compiled
def test_matvec_and_rmatvec_agree(rng):
    c = _backend.get("compiled")
    A = rng.normal(size=(9, 31)) + 1j * rng.normal(size=(9, 31))
    for cols in (1, 3):
        x = np.ascontiguousarray(rng.normal(size=(31, cols)) + 1j * rng.normal(size=(31, cols)))
        y = np.ascontiguousarray(rng.normal(size=(9, cols)) + 1j * rng.normal(size=(9, cols)))
        np.testing.assert_allclose(c.matvec(A, x), _pykernels.matvec(A, x), atol=1e-12)
        np.testing.assert_allclose(c.rmatvec(A, y), _pykernels.rmatvec(A, y), atol=1e-12)
        np.testing.assert_allclose(c.matvec(A, x), A @ x, atol=1e-12)
        np.testing.assert_allclose(c.rmatvec(A, y), A.conj().T @ y, atol=1e-12)


@needs_compiled
def test_butterflies_agree(rng):
    c = _backend.get("compiled")
    for n in (1, 2, 16, 512):
        rev, tw = _plan(n)
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        a = np.ascontiguousarray(x[rev])
        b = a.copy()
        c.fft_butterflies(a, tw)
        _pykernels.fft_butterflies(b, tw)
        np.testing.assert_allclose(a, b, atol=1e-12)


@needs_compiled
def test_fnv_agrees():
    data = np.frombuffer(b"direct spectral evaluation", dtype=np.uint8)
    assert _backend.get("compiled").fnv1a64(data) == _pykernels.fnv1a64(data)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, DSE_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import dse; print(dse.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
