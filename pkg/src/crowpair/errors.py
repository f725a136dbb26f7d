"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


class NumericalError(RuntimeError):
    """A solver or quadrature failed to reach the requested accuracy."""
