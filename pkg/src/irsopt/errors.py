"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed or unknown entries in a scenario config file."""


class NumericalError(ArithmeticError):
    """A numerical precondition failed (usually signals an upstream bug)."""
