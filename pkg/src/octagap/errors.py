"""Exceptions shared across the package."""


class OctagapError(Exception):
    """Base class for errors raised by this package."""


class DomainError(OctagapError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation was requested at (or too close to) a pole."""


class TruncationError(OctagapError, ValueError):
    """A requested truncation radius exceeds what the supplied data supports."""


class InsufficientDataError(OctagapError, ValueError):
    """Not enough usable data points for a fit or estimate."""


class SetupError(OctagapError, RuntimeError):
    """A derived configuration (e.g. a covering family) could not be built."""


class MemoryGuardError(OctagapError, ValueError):
    """An enumeration was refused because it would exhaust memory."""
