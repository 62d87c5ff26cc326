"""Exception types raised across the package."""


class RqmcfError(Exception):
    """Base class for package errors."""


class DimensionError(RqmcfError, ValueError):
    """Array shapes or dimensions do not agree, or exceed a supported limit."""


class ConfigError(RqmcfError, ValueError):
    """Invalid experiment or operation parameters."""


class InstanceTooLargeError(RqmcfError, ValueError):
    """An exact computation was requested on an instance past its guard rail."""


class NumericalError(RqmcfError, ArithmeticError):
    """A factorization failed or a post-solve residual check did not hold."""
