"""Exception hierarchy shared across the package."""


class EventCorrError(Exception):
    """Base class for all package-specific errors."""


class DomainError(EventCorrError, ValueError):
    """Input outside the physically valid domain (e.g. inside the horizon)."""


class ConvergenceError(EventCorrError, RuntimeError):
    """A numerical routine failed to reach its target tolerance."""


class RegimeError(EventCorrError, ValueError):
    """Parameters outside the weak-interaction regime the model supports."""


class UnsupportedError(EventCorrError, ValueError):
    """Operator content beyond the affine class the engine handles."""


class ResourceError(EventCorrError, ValueError):
    """Discretized-oracle dimensions exceed the configured caps."""


class ConfigError(EventCorrError, ValueError):
    """Invalid or missing run configuration."""
