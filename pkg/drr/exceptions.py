"""
Errors raised by the DENBE toolkit.

Every failure an operation can report is one of these. They subclass
ValueError so plain numerical callers can catch them without importing this
module; the CLI turns them into CommandError and the API into HTTP 400.
"""


class DenbeError(ValueError):
    """Base class for all toolkit errors."""


class ConfigurationError(DenbeError):
    """An invalid parameter set: non-COLA STFT, missing room for babble, bad manifest..."""


class DomainError(DenbeError):
    """An argument outside the operation's mathematical domain."""


class ShapeError(DenbeError):
    """Arrays whose shapes do not agree."""


class DegenerateInputError(DenbeError):
    """Input carrying no usable information, e.g. a silent channel or an all-zero AIR."""
