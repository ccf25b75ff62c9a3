"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
anything else -> 3.
"""


class PQForecastError(Exception):
    """Base class for all package errors."""


class DataError(PQForecastError):
    """Malformed, inconsistent or insufficient input data."""


class ConfigError(PQForecastError):
    """Invalid configuration or usage (bad planning level, unknown model, ...)."""
