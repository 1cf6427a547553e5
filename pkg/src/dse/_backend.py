"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``DSE_BACKEND=python`` to force the fallback, or
``DSE_BACKEND=compiled`` to fail loudly when the extension is missing.
"""
import os

from dse import _pykernels

_requested = os.environ.get("DSE_BACKEND", "").strip().lower()

try:
    if _requested == "python":
        raise ImportError("python backend requested")
    from dse import _kernels as _compiled
except ImportError:
    if _requested == "compiled":
        raise
    _compiled = None

kernels = _compiled if _compiled is not None else _pykernels
BACKEND = "compiled" if _compiled is not None else "python"


def available():
    """Names of the backends importable in this process."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
