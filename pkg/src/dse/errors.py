"""Exception types raised across the package.

The CLI maps these onto its exit codes, so each class corresponds to one
failure category rather than one call site.
"""


class DSEError(Exception):
    """Base class for all package errors."""


class ConfigError(DSEError, ValueError):
    """Invalid parameters (mode counts, ratios, unknown options)."""


class DomainError(DSEError, ValueError):
    """Coordinates or angles outside their admissible range."""


class ShapeError(DSEError, ValueError):
    """Array dimensions that do not line up."""


class BindingError(ShapeError):
    """A field was paired with a point set it was not sampled on."""


class ModeIndexError(DSEError, IndexError):
    """Mode or harmonic index outside its valid range."""


class SizeError(ConfigError):
    """Transform size unsupported by the requested algorithm."""


class FitError(DSEError, ValueError):
    """Too few or too narrowly spread samples for a regression."""


class UndefinedMetricError(DSEError, ValueError):
    """A metric whose denominator vanished."""


class TrainingDiverged(DSEError, FloatingPointError):
    """Non-finite loss encountered during training."""
