"""Shared exception types."""


class PkgSentryError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(PkgSentryError):
    """Bad configuration: rule files, model profiles, backend setup."""
