"""Exception types raised across the package."""


class NumericDomainError(ValueError):
    """A value is non-finite or outside the domain an operation accepts."""


class StructuralError(ValueError):
    """Array lengths or shapes do not agree."""


class NoFixedPointError(ArithmeticError):
    """The steady-state EMSE equation has no reachable fixed point."""


class UnstableOperatingPointError(ArithmeticError):
    """The impulsive-noise EMSE denominator is not positive.

    Raised when the kernel width is too small for the noise mixture.
    """


class ConfigError(ValueError):
    """Malformed experiment configuration."""
