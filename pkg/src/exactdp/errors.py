"""Exception types raised by the exactdp package."""


class ExactDPError(Exception):
    """Base class for all exactdp errors."""


class ConfigurationError(ExactDPError):
    """A requested configuration cannot be honoured (e.g. precision exceeds
    the platform maximum)."""


class InvalidParameterError(ExactDPError, ValueError):
    """A parameter violates a documented constraint; the message names the
    violated constraint."""


class SizeViolationError(ExactDPError):
    """The outcome list is larger than the declared maximum outcome count."""


class InexactArithmeticError(ExactDPError):
    """A monitored arithmetic phase performed at least one inexact, overflowed
    or underflowed operation.  The mechanism never returns a silently rounded
    result; this error is the signal that precision determination or the
    caller-declared bounds are wrong."""


class InsufficientPrecisionError(ExactDPError):
    """The sampler could not isolate a single element with the available bits
    of precision.  Raised instead of silently returning an index that the
    infinite-precision process might not have chosen."""


class RandomnessError(ExactDPError):
    """The bit source behaved pathologically (the rejection loop hit its
    retry cap)."""
