"""Arbitrary-precision binary floating point with an exactness contract.

Every operation in this module either produces the infinite-precision result
bit for bit, or raises a status flag on its :class:`ArithContext`.  Callers
verify whole phases at once: clear the flags, run a computation, then ask the
context whether anything was rounded.  Division is deliberately absent from
the operation set; the sampling layer is designed never to need it.

Values are ``gmpy2.mpfr`` instances (GMP/MPFR under the hood).  The backend
is an implementation detail: nothing outside this module touches gmpy2
contexts directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable

import gmpy2
from gmpy2 import mpfr

from .errors import ConfigurationError

#: Maximum mantissa precision supported by the backend, queried once at import.
PLATFORM_MAX_PRECISION = int(gmpy2.get_max_precision())

_EMIN = gmpy2.get_emin_min()
_EMAX = gmpy2.get_emax_max()

#: Status flags tracked per context.  ``nan`` reports invalid operations.
FLAG_NAMES = ("inexact", "overflow", "underflow", "nan")


@lru_cache(maxsize=512)
def _sized_context(precision: int) -> gmpy2.context:
    """A wide-exponent context used only for constructions that are exact by
    sizing; its flags are never consulted."""
    return gmpy2.context(precision=precision, emin=_EMIN, emax=_EMAX)


def dyadic(mantissa: int, exp2: int = 0) -> mpfr:
    """Return ``mantissa * 2**exp2`` exactly.

    The result is sized to the mantissa, so the construction never rounds
    regardless of any ambient precision settings.
    """
    mantissa = int(mantissa)
    if mantissa == 0:
        return mpfr(0)
    ctx = _sized_context(max(abs(mantissa).bit_length(), 2))
    value = gmpy2.mpfr(mantissa, precision=max(abs(mantissa).bit_length(), 2))
    if exp2 > 0:
        value = ctx.mul_2exp(value, exp2)
    elif exp2 < 0:
        value = ctx.div_2exp(value, -exp2)
    return value


def decompose(value: mpfr) -> tuple[int, int]:
    """Return ``(mantissa, exp2)`` with ``value == mantissa * 2**exp2`` and an
    odd mantissa (trailing zero bits stripped).  Zero decomposes to (0, 0)."""
    m, e = value.as_mantissa_exp()
    m, e = int(m), int(e)
    if m == 0:
        return 0, 0
    trailing = (abs(m) & -abs(m)).bit_length() - 1
    return m >> trailing, e + trailing


def mantissa_bits(value: mpfr) -> int:
    """Number of significant binary digits of ``value`` (0 for zero)."""
    m, _ = decompose(value)
    return abs(m).bit_length()


def compact(value: mpfr) -> mpfr:
    """Exact copy of ``value`` stored at its minimal precision.

    Long-running computations keep cumulative tables alive; re-sizing them to
    their true significant bits keeps memory proportional to information
    content rather than to the working precision.
    """
    m, e = decompose(value)
    return dyadic(m, e)


#: Working precisions at or below this keep values as allocated; re-sizing
#: only pays for itself once each value costs kilobytes.
COMPACT_THRESHOLD = 1024


def compact_for_storage(value: mpfr, working_precision: int) -> mpfr:
    """:func:`compact` when the working precision is large, identity
    otherwise.  Either way the value is unchanged."""
    if working_precision <= COMPACT_THRESHOLD:
        return value
    return compact(value)


def to_fraction(value: mpfr) -> Fraction:
    """Exact rational value of ``value`` (test oracles rely on this)."""
    num, den = value.as_integer_ratio()
    return Fraction(int(num), int(den))


class ArithContext:
    """A fixed-precision arithmetic context with queryable exactness flags.

    Flags only ever accumulate between calls to :meth:`clear_flags`, so a
    single check after N operations answers whether any of them rounded.
    A context and the values it produces are confined to one thread at a
    time; run parallel work on independent contexts.
    """

    def __init__(self, precision_bits: int):
        if not isinstance(precision_bits, int) or isinstance(precision_bits, bool):
            raise ConfigurationError("precision_bits must be an integer")
        if precision_bits < 1:
            raise ConfigurationError(
                f"precision_bits must be >= 1, got {precision_bits}")
        if precision_bits > PLATFORM_MAX_PRECISION:
            raise ConfigurationError(
                f"precision_bits {precision_bits} exceeds platform maximum "
                f"{PLATFORM_MAX_PRECISION}")
        self.precision = precision_bits
        self._ctx = gmpy2.context(
            precision=precision_bits, emin=_EMIN, emax=_EMAX)

    def __repr__(self):
        return f"ArithContext(precision_bits={self.precision})"

    # -- flag handling -----------------------------------------------------

    @property
    def flags(self) -> frozenset[str]:
        """Names of the status flags currently raised."""
        raised = []
        if self._ctx.inexact:
            raised.append("inexact")
        if self._ctx.overflow:
            raised.append("overflow")
        if self._ctx.underflow:
            raised.append("underflow")
        if self._ctx.invalid:
            raised.append("nan")
        return frozenset(raised)

    def clear_flags(self) -> None:
        self._ctx.clear_flags()

    def was_exact(self) -> bool:
        """True iff no operation since the last flag clear was rounded."""
        return not self.flags

    def monitored(self, computation: Callable, *args, **kwargs):
        """Clear the flags, run ``computation`` and report its exactness.

        Returns ``(result, was_exact)``.  This is the phase-boundary check the
        mechanism uses instead of trapping per operation.  Nesting resets the
        flags: a computation that itself calls ``monitored`` hides its earlier
        operations from the outer check, so verify disjoint phases separately.
        """
        self.clear_flags()
        result = computation(*args, **kwargs)
        return result, self.was_exact()

    # -- value construction -------------------------------------------------

    def from_int(self, n: int) -> mpfr:
        """Convert an integer; flags inexact if it needs more mantissa bits
        than the context holds."""
        return self._ctx.plus(gmpy2.mpfr(n, precision=max(n.bit_length(), 2) if n else 2))

    def exp2(self, e: int) -> mpfr:
        """2**e, always exact (single mantissa bit)."""
        return dyadic(1, e)

    def zero(self) -> mpfr:
        return mpfr(0)

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b) -> mpfr:
        return self._ctx.add(a, b)

    def sub(self, a, b) -> mpfr:
        return self._ctx.sub(a, b)

    def mul(self, a, b) -> mpfr:
        return self._ctx.mul(a, b)

    def fsum(self, values) -> mpfr:
        """Correctly rounded sum of an iterable, flagged if inexact."""
        return self._ctx.fsum(list(values))

    @staticmethod
    def compare(a, b) -> int:
        """-1, 0 or +1.  Comparisons are exact at any precision and never
        raise flags."""
        if a < b:
            return -1
        if a > b:
            return 1
        return 0

    @staticmethod
    def ceil_int(a) -> int:
        """Exact integer ceiling of a finite value (flag-free)."""
        return int(gmpy2.ceil(a))

    def pow_int(self, base: mpfr, n: int) -> mpfr:
        """``base ** n`` for n >= 0 by repeated squaring.

        Exact whenever the context precision is at least
        ``max(1, mantissa_bits(base) * n)``; otherwise the inexact flag is
        raised on the squaring or multiplication that rounded.
        """
        if n < 0:
            raise ValueError("pow_int requires a nonnegative exponent")
        result = dyadic(1, 0)
        if n == 0:
            return result
        square = base
        while True:
            if n & 1:
                result = self._ctx.mul(result, square)
            n >>= 1
            if n == 0:
                return result
            square = self._ctx.mul(square, square)


def ctx_new(precision_bits: int) -> ArithContext:
    """Create a fresh context with all flags clear."""
    return ArithContext(precision_bits)
