"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario/experiment configuration (CLI exit code 1)."""


class GeometryError(ValueError):
    """Degenerate geometry: coincident positions, nonpositive distances."""


class NumericalError(RuntimeError):
    """Numerical failure at runtime (CLI exit code 2)."""
