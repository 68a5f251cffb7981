"""Division-free normalized sampling over exact weights.

An index is drawn proportionally to exact weights without ever dividing:
the cumulative weights partition ``[0, t)`` (t the total weight), a uniform
dyadic value is drawn from ``[0, 2**g)`` for the smallest power of two
``2**g >= t`` and rejected while it lands in ``[t, 2**g)``, and the surviving
value's interval identifies the sampled element.  Because ``2**(g-1) < t``,
each draw is rejected with probability below one half.

Timing-channel mitigation: the rejection loop always runs at least ``k``
times, drawing a full batch of bits per iteration, so an adversary observing
time or randomness use learns something only when more than ``k`` rejections
occur, which happens with probability at most ``2**-k``.

Three sampling variants are provided.  ``full-scan`` (the default) reveals
all bits at once and makes one complete pass over the cumulative weights, so
the work done is independent of how the weight mass is concentrated.
``standard`` narrows the candidate range bit by bit.  ``optimized`` pads the
table with a dummy element up to ``2**g``, draws bits lazily and restarts if
the dummy wins; it is cheapest but re-introduces the concentration timing
channel, so it is opt-in.

A sampling call owns its table, context and bit source for its duration;
nothing here touches shared mutable state, so independent samplers may run
on independent contexts in parallel.
"""

from __future__ import annotations

import os
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .errors import (
    InsufficientPrecisionError,
    InvalidParameterError,
    RandomnessError,
)
from .exact_arith import ArithContext, compact_for_storage, decompose, dyadic

VARIANTS = ("standard", "full-scan", "optimized")

#: Iterations beyond which the rejection loop declares the bit source broken.
#: Rejection probability is < 1/2 per draw, so 64 consecutive failures has
#: probability below 2**-64.
RETRY_MARGIN = 64


# ---------------------------------------------------------------------------
# bit sources
# ---------------------------------------------------------------------------

class BitSource(ABC):
    """A stream of unbiased random bits, consumed strictly sequentially."""

    @abstractmethod
    def next_bit(self) -> int:
        """Return 0 or 1."""

    def next_bits(self, n: int) -> int:
        """Return ``n`` bits as a big-endian integer (0 for n == 0)."""
        acc = 0
        for _ in range(n):
            acc = (acc << 1) | self.next_bit()
        return acc


class OsBitSource(BitSource):
    """Operating-system cryptographic randomness; the default source.

    ``next_bit`` performs one entropy read per bit, so the cost of a bit is
    constant rather than dependent on hidden buffer state.  ``next_bits`` is
    a batched read, used only where the number of bits consumed is fixed by
    configuration.
    """

    def next_bit(self) -> int:
        return os.urandom(1)[0] & 1

    def next_bits(self, n: int) -> int:
        if n <= 0:
            return 0
        nbytes = (n + 7) // 8
        raw = int.from_bytes(os.urandom(nbytes), "big")
        return raw >> (8 * nbytes - n)


class SeededBitSource(BitSource):
    """Deterministic pseudorandom bits for tests and replayable benchmarks.

    Not suitable for protecting real data.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def next_bit(self) -> int:
        return self._rng.getrandbits(1)

    def next_bits(self, n: int) -> int:
        return self._rng.getrandbits(n) if n > 0 else 0


class ScriptedBitSource(BitSource):
    """Replays a fixed bit string, then raises.  Used to drive the sampler
    through every point of its dyadic grid in tests."""

    def __init__(self, bits):
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        self._bits = list(bits)
        self._pos = 0

    def next_bit(self) -> int:
        if self._pos >= len(self._bits):
            raise RandomnessError("scripted bit source exhausted")
        bit = self._bits[self._pos]
        self._pos += 1
        return bit


class CountingBitSource(BitSource):
    """Wraps another source and counts the bits handed out."""

    def __init__(self, inner: BitSource):
        self.inner = inner
        self.bits_consumed = 0

    def next_bit(self) -> int:
        self.bits_consumed += 1
        return self.inner.next_bit()

    def next_bits(self, n: int) -> int:
        self.bits_consumed += n
        return self.inner.next_bits(n)


def resolve_bit_source(source) -> BitSource:
    """Accept ``None`` (OS randomness), an integer seed, or a ready source."""
    if source is None:
        return OsBitSource()
    if isinstance(source, BitSource):
        return source
    if isinstance(source, int) and not isinstance(source, bool):
        return SeededBitSource(source)
    raise InvalidParameterError(
        f"expected None, an int seed or a BitSource, got {type(source).__name__}")


# ---------------------------------------------------------------------------
# weight tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleOptions:
    """Sampling knobs: minimum retry count ``k`` and variant name."""

    k: int = 1
    variant: str = "full-scan"

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise InvalidParameterError(f"k must be an integer >= 1, got {self.k}")
        if self.variant not in VARIANTS:
            raise InvalidParameterError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}")


@dataclass
class WeightTable:
    """Exact weights with their cumulative sums, total, and the exponent ``g``
    of the smallest power of two at least the total (element i owns the
    half-open interval [cumulative[i-1], cumulative[i]))."""

    weights: list
    cumulative: list
    total: object
    g: int

    def __len__(self):
        return len(self.weights)


def pow2_ceiling_exponent(value) -> int:
    """Smallest g with ``2**g >= value`` for a positive value."""
    m, e = decompose(value)
    if m <= 0:
        raise InvalidParameterError("value must be positive")
    bits = m.bit_length()
    if m == 1 << (bits - 1):
        return e + bits - 1
    return e + bits


def total_and_cumulative(ctx: ArithContext, weights) -> WeightTable:
    """Build the cumulative table under exactness monitoring.

    Raises if any weight is negative, if the list is empty, if the total is
    zero, or if any cumulative sum could not be represented exactly at the
    context precision.
    """
    weights = list(weights)
    if not weights:
        raise InvalidParameterError("weights must contain at least one element")
    for w in weights:
        if w < 0:
            raise InvalidParameterError("weights must be nonnegative")

    def accumulate():
        sums = []
        running = ctx.zero()
        for w in weights:
            running = ctx.add(running, w)
            sums.append(compact_for_storage(running, ctx.precision))
        return sums

    cumulative, exact = ctx.monitored(accumulate)
    if not exact:
        raise InsufficientPrecisionError(
            f"cumulative weights are not exactly representable at "
            f"{ctx.precision} bits")
    total = cumulative[-1]
    if total == 0:
        raise InvalidParameterError("total weight is zero")
    return WeightTable(
        weights=[compact_for_storage(w, ctx.precision) for w in weights],
        cumulative=cumulative,
        total=total,
        g=pow2_ceiling_exponent(total),
    )


# ---------------------------------------------------------------------------
# uniform draws over [0, t)
# ---------------------------------------------------------------------------

def _draw_bits(n: int, src: BitSource) -> int:
    """Consume ``n`` bits one at a time and assemble them into an integer.

    Bits are packed through a byte buffer: per-bit big-integer shifts would
    cost quadratically in the working precision.
    """
    buf = bytearray()
    byte = 0
    filled = 0
    for _ in range(n):
        byte = (byte << 1) | src.next_bit()
        filled += 1
        if filled == 8:
            buf.append(byte)
            byte = 0
            filled = 0
    pad = 0
    if filled:
        pad = 8 - filled
        buf.append(byte << pad)
    return int.from_bytes(bytes(buf), "big") >> pad


def _draw_accepted(p: int, t, g: int, k: int, src: BitSource) -> tuple[int, int]:
    """Run the rejection loop; return ``(accepted_units, iterations)``.

    Each iteration draws ``p + 1`` bits forming a uniform value on the grid
    ``2**(g - p - 1)`` within ``[0, 2**g)``.  The loop runs until a value
    below ``t`` has been seen *and* at least ``k`` iterations have elapsed;
    the first in-range value is the one returned.
    """
    unit_exp = g - p - 1
    cap = RETRY_MARGIN + k
    accepted = None
    iterations = 0
    while iterations < k or accepted is None:
        if iterations >= cap:
            raise RandomnessError(
                f"no in-range draw after {cap} iterations; bit source is "
                "not behaving like unbiased randomness")
        acc = _draw_bits(p + 1, src)
        iterations += 1
        if accepted is None and dyadic(acc, unit_exp) < t:
            accepted = acc
    return accepted, iterations


def get_random_value(p: int, t, k: int, src: BitSource):
    """Uniform dyadic value in ``[0, t)`` with ``p + 1`` bits below ``2**g``.

    ``t`` must be positive and ``p >= 1``.  Consumes exactly ``p + 1`` bits
    per rejection-loop iteration regardless of acceptance.
    """
    if p < 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    g = pow2_ceiling_exponent(t)
    acc, _ = _draw_accepted(p, t, g, k, src)
    return dyadic(acc, g - p - 1)


# ---------------------------------------------------------------------------
# index selection
# ---------------------------------------------------------------------------

def _narrow(cumulative, lo: int, hi: int, s, s_hi) -> tuple[int, int]:
    """Drop elements whose interval cannot contain any completion of the
    partially revealed value ``s``.

    Element i is ruled out when its upper bound is at or below ``s`` (it can
    never be reached even if all remaining bits are 0) or when its lower
    bound is at or above ``s_hi = s + window`` (unreachable even if all
    remaining bits are 1).  Comparisons of binary floating values are exact
    at any precision, and the survivors of a nondecreasing table form a
    contiguous range.
    """
    while lo < hi and cumulative[lo] <= s:
        lo += 1
    while hi - lo > 1 and cumulative[hi - 2] >= s_hi:
        hi -= 1
    return lo, hi


def _sample_standard(table: WeightTable, p: int, opts: SampleOptions,
                     src: BitSource) -> int:
    g = table.g
    acc, _ = _draw_accepted(p, table.total, g, opts.k, src)
    n = len(table)
    lo, hi = 0, n
    for revealed in range(1, p + 2):
        prefix = acc >> (p + 1 - revealed)
        s = dyadic(prefix, g - revealed)
        s_hi = dyadic(prefix + 1, g - revealed)
        lo, hi = _narrow(table.cumulative, lo, hi, s, s_hi)
        if hi - lo == 1:
            return lo
    raise InsufficientPrecisionError(
        f"{hi - lo} elements remain after {p + 1} bits; the cumulative table "
        "is finer than the sampling precision")


def _sample_full_scan(table: WeightTable, p: int, opts: SampleOptions,
                      src: BitSource) -> int:
    g = table.g
    acc, _ = _draw_accepted(p, table.total, g, opts.k, src)
    unit_exp = g - p - 1
    s = dyadic(acc, unit_exp)
    s_hi = dyadic(acc + 1, unit_exp)
    # One complete pass, no early exit: the amount of work done is the same
    # whatever the weight concentration looks like.
    survivor = -1
    survivors = 0
    prev = None
    for i, c in enumerate(table.cumulative):
        below = c <= s
        above = prev is not None and prev >= s_hi
        if not below and not above:
            survivor = i
            survivors += 1
        prev = c
    if survivors == 1:
        return survivor
    raise InsufficientPrecisionError(
        f"{survivors} elements remain after {p + 1} bits; the cumulative "
        "table is finer than the sampling precision")


def _sample_optimized(table: WeightTable, p: int, opts: SampleOptions,
                      src: BitSource) -> int:
    g = table.g
    n = len(table)
    cumulative = table.cumulative
    padded = cumulative[-1] < dyadic(1, g)
    if padded:
        cumulative = list(cumulative) + [dyadic(1, g)]
    total_elements = n + 1 if padded else n
    restarts = 0
    cap = RETRY_MARGIN + opts.k
    while True:
        if restarts >= cap:
            raise RandomnessError(
                f"dummy element won {cap} times in a row; bit source is not "
                "behaving like unbiased randomness")
        prefix = 0
        lo, hi = 0, total_elements
        result = None
        for revealed in range(1, p + 2):
            prefix = (prefix << 1) | src.next_bit()
            s = dyadic(prefix, g - revealed)
            s_hi = dyadic(prefix + 1, g - revealed)
            lo, hi = _narrow(cumulative, lo, hi, s, s_hi)
            if hi - lo == 1:
                result = lo
                break
        if result is None:
            raise InsufficientPrecisionError(
                f"{hi - lo} elements remain after {p + 1} bits; the "
                "cumulative table is finer than the sampling precision")
        if padded and result == n:
            restarts += 1
            continue
        return result


_VARIANT_FUNCS = {
    "standard": _sample_standard,
    "full-scan": _sample_full_scan,
    "optimized": _sample_optimized,
}


def normalized_sample(table: WeightTable, p: int, opts: SampleOptions,
                      src: BitSource) -> int:
    """Sample an index with probability exactly ``weights[i] / total``.

    ``p`` is the working precision the cumulative sums were computed at.  If
    the table turns out to be finer than ``p`` bits can resolve, an
    :class:`InsufficientPrecisionError` is raised rather than ever returning
    an index the infinite-precision process might not have chosen.
    """
    if len(table) < 1:
        raise InvalidParameterError("weight table is empty")
    if p < 1:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    return _VARIANT_FUNCS[opts.variant](table, p, opts, src)
