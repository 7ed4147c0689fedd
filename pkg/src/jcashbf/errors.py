"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid configuration value or inconsistent experiment setup."""


class SchemaError(Exception):
    """File container has the wrong magic tag, version, or layout."""


class NumericalError(Exception):
    """A numerical routine hit a degenerate or non-finite state."""
