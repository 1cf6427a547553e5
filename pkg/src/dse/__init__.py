"""Direct spectral evaluation on arbitrary point sets.

Truncated nonuniform Fourier and spherical-harmonic transforms computed as
dense matrix-vector products, their adjoints, a small spectral operator
layer, and a benchmark harness. Hot loops run in a compiled extension when
it is available and fall back to numpy otherwise (see ``dse.BACKEND``).
"""
from dse._backend import BACKEND
from dse.core import CoeffVector, Field, ModeSpec, PointSet, SpectralMatrix
from dse.errors import (
    BindingError,
    ConfigError,
    DomainError,
    DSEError,
    ShapeError,
)
from dse.nudft import (
    build_fourier_matrix,
    build_lattice_factors,
    lattice_adjoint,
    lattice_forward,
    nudft_adjoint,
    nudft_forward,
)
from dse.spherical import build_sh_matrix, dh_grid, dh_quadrature_weights, sh_adjoint, sh_forward

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "PointSet", "ModeSpec", "SpectralMatrix", "Field", "CoeffVector",
    "DSEError", "ConfigError", "DomainError", "ShapeError", "BindingError",
    "build_fourier_matrix", "nudft_forward", "nudft_adjoint",
    "build_lattice_factors", "lattice_forward", "lattice_adjoint",
    "build_sh_matrix", "sh_forward", "sh_adjoint", "dh_grid", "dh_quadrature_weights",
]
