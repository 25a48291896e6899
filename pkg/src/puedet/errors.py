"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition (non-finite, out of range, ...)."""


class NumericalDegeneracyError(ArithmeticError):
    """A numerically required quantity is singular or too ill-conditioned to invert."""


class ConfigError(ValueError):
    """A configuration file failed to parse or validate; the message names the problem."""
