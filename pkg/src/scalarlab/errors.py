"""Exception types raised across the package."""


class ScalarLabError(Exception):
    """Base class for all package errors."""


class DomainError(ScalarLabError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class ConfigurationError(ScalarLabError, ValueError):
    """A model, grid or experiment is set up inconsistently."""


class GeometryError(ScalarLabError, ValueError):
    """A ball, window or test function does not fit inside the computed region."""


class FitError(ScalarLabError, ValueError):
    """A regression cannot be performed on the supplied data."""
