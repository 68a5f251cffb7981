"""Base-2 privacy parameters.

A privacy level is specified as a triple of positive integers ``(x, y, z)``
encoding ``eta = -z*log2(x / 2**y)``.  The point of the encoding is that the
per-utility weight base ``2**-eta == (x / 2**y) ** z`` is an exactly
representable binary number, so the whole weight computation can be carried
out without rounding.  Converting back to a conventional base-e epsilon is
the single approximate computation in this package and is provided for
reporting only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InsufficientPrecisionError, InvalidParameterError
from .exact_arith import ArithContext, dyadic, mantissa_bits


@dataclass(frozen=True)
class Eta:
    """Validated base-2 privacy parameter ``-z*log2(x / 2**y)``.

    Constraints: ``x >= 1``, ``y >= 1``, ``z >= 1`` and ``x <= 2**y`` so the
    weight base lies in (0, 1].  ``x == 2**y`` (eta 0, the uniform
    distribution) is accepted; it is useful in tests.  Instances are
    immutable and freely shareable.
    """

    x: int
    y: int
    z: int

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidParameterError(f"eta component {name} must be an integer")
            if value < 1:
                raise InvalidParameterError(
                    f"eta component {name} must be >= 1, got {value}")
        if self.x > 2 ** self.y:
            raise InvalidParameterError(
                f"eta requires x <= 2**y (x={self.x}, 2**y={2 ** self.y}), "
                "otherwise the weight base exceeds 1")

    @classmethod
    def parse(cls, text: str) -> "Eta":
        """Parse the command-line form ``x,y,z``."""
        parts = text.split(",")
        if len(parts) != 3:
            raise InvalidParameterError(f"eta must be 'x,y,z', got {text!r}")
        try:
            x, y, z = (int(p) for p in parts)
        except ValueError as exc:
            raise InvalidParameterError(f"eta components must be integers: {text!r}") from exc
        return cls(x, y, z)

    @property
    def bits_x(self) -> int:
        """Bits needed to write x in binary."""
        return self.x.bit_length()

    @property
    def base_precision(self) -> int:
        """Mantissa bits sufficient to hold ``2**-eta`` exactly: z*(y + bits_x)."""
        return self.z * (self.y + self.bits_x)

    @property
    def value(self) -> float:
        """Approximate numeric value of eta.  Reporting only; never used in
        weight computation or sampling."""
        return -self.z * math.log2(self.x / 2.0 ** self.y)

    def base(self, ctx: ArithContext):
        """The exact weight base ``2**-eta == (x * 2**-y) ** z``.

        Computed by repeated squaring under monitoring; the context must
        provide at least :attr:`base_precision` bits.
        """
        result, exact = ctx.monitored(ctx.pow_int, dyadic(self.x, -self.y), self.z)
        if not exact:
            raise InsufficientPrecisionError(
                f"context precision {ctx.precision} cannot represent the weight "
                f"base for eta={self}; need {self.base_precision} bits")
        return result

    def to_epsilon(self) -> float:
        """Base-e equivalent ``ln(2) * eta``.

        This is the only inexact computation in the package.  It exists so
        results can be reported on the conventional epsilon scale; nothing in
        the mechanism consumes it.
        """
        return math.log(2.0) * self.value


def eta_new(x: int, y: int, z: int) -> Eta:
    """Validate and construct an :class:`Eta`."""
    return Eta(x, y, z)


def base_mantissa_within_bound(eta: Eta, ctx: ArithContext) -> bool:
    """True iff the computed base uses no more than ``z*(y + bits_x)``
    significant bits (sanity check exposed for the test suite)."""
    return mantissa_bits(eta.base(ctx)) <= eta.base_precision
