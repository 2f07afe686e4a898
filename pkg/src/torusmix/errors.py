"""Exception types shared across the package."""


class TorusmixError(Exception):
    """Base class for all torusmix errors."""


class ConfigError(TorusmixError):
    """Invalid configuration or parameter set."""


class NonZeroMeanError(TorusmixError):
    """Operation requires a mean-zero field but the k=0 mode is not negligible."""


class DeltaOutOfRangeError(TorusmixError):
    """Ball radius delta outside the resolvable range [1/n, 1/2]."""


class ZeroFieldError(TorusmixError):
    """Operation undefined on an identically zero field."""


class GeometryError(TorusmixError):
    """Requested geometric construction does not fit on the torus."""


class DegenerateVelocityError(TorusmixError):
    """Steepest-descent direction vanishes (zero denominator)."""

    def __init__(self, message, raw_norm=0.0):
        super().__init__(message)
        self.raw_norm = raw_norm


class CFLViolationError(TorusmixError):
    """Requested time step exceeds the advective CFL limit."""


class NonMonotoneTimeError(TorusmixError):
    """Sample times for an accumulator must be strictly increasing."""


class InsufficientDataError(TorusmixError):
    """Not enough samples in the requested window for a fit."""


class ParamMismatchError(TorusmixError):
    """Bound parameters are inconsistent with the supplied cost data."""


class SupportViolationError(TorusmixError):
    """Field is not compactly supported in the required sub-cube."""


class ZeroCostError(TorusmixError):
    """Cost integral must be positive."""
