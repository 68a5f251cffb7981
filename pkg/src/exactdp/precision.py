"""Working-precision determination.

The sampler needs every subset sum of the mechanism's weights to be exactly
representable.  Two strategies provide a sufficient mantissa size before any
private data is read:

* :func:`theoretical_precision` - a closed-form worst-case bound from the
  declared utility range and outcome count.
* :func:`empirical_precision` - a doubling search that actually performs the
  worst-case combinations at candidate precisions and keeps the first one
  where nothing rounds.  It never exceeds twice the minimal sufficient
  precision, and it is capped by the theoretical bound so it can only
  improve on it.

Both are pure functions of the declared bounds, so the chosen precision can
never leak anything about the data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigurationError, InvalidParameterError
from .exact_arith import PLATFORM_MAX_PRECISION, ArithContext, dyadic
from .privacy_params import Eta

STRATEGIES = ("theoretical", "empirical")


@dataclass(frozen=True)
class PrecisionRequest:
    """Data-independent description of a mechanism workload: integer utility
    bounds, maximum outcome count and the privacy parameter."""

    u_min: int
    u_max: int
    o_max: int
    eta: Eta

    def __post_init__(self):
        for name in ("u_min", "u_max", "o_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidParameterError(f"{name} must be an integer")
        if self.u_min > self.u_max:
            raise InvalidParameterError(
                f"u_min ({self.u_min}) must not exceed u_max ({self.u_max})")
        if self.o_max < 1:
            raise InvalidParameterError(f"o_max must be >= 1, got {self.o_max}")


def weight_exponent_range(u_min: int, u_max: int) -> tuple[int, int]:
    """Exponent range actually used for weights ``base**e``.

    Negative utilities would require negative powers of the base, which have
    no finite binary representation unless x is a power of two.  The mechanism
    therefore shifts all utilities by ``-min(u_min, 0)`` before
    exponentiation; the shift is a fixed function of the declared bounds and
    scales every weight equally, so the sampled distribution is unchanged.
    For ``u_min >= 0`` this is the identity.
    """
    shift = min(u_min, 0)
    return u_min - shift, u_max - shift


def theoretical_precision(request: PrecisionRequest) -> int:
    """Worst-case sufficient precision from the declared bounds.

    Returns ``(max(1,|u_min|) + max(1,|u_max|)) * z*(y + bits_x) + o_max``:
    enough bits for the largest possible subset sum's integer part and for
    the finest fractional part of any single weight.
    """
    eta = request.eta
    per_unit = eta.z * (eta.y + eta.bits_x)
    bits = (max(1, abs(request.u_min)) + max(1, abs(request.u_max))) * per_unit \
        + request.o_max
    if bits > PLATFORM_MAX_PRECISION:
        raise ConfigurationError(
            f"required precision {bits} exceeds platform maximum "
            f"{PLATFORM_MAX_PRECISION}")
    return bits


def check_precision(request: PrecisionRequest, p: int) -> bool:
    """True iff precision ``p`` survives the worst-case weight combinations.

    Computes the base, the maximal sum (o_max copies of the largest weight),
    and for every integer utility in range the sum of its weight with the
    ceiling of that maximal sum.  Passes iff no operation rounded.
    """
    if p < 1:
        raise InvalidParameterError(f"precision must be >= 1, got {p}")
    ctx = ArithContext(p)
    eta = request.eta
    lo, hi = weight_exponent_range(request.u_min, request.u_max)

    def worst_case():
        base = ctx.pow_int(dyadic(eta.x, -eta.y), eta.z)
        w_max = ctx.pow_int(base, lo)
        maxsum = ctx.zero()
        for _ in range(request.o_max):
            maxsum = ctx.add(maxsum, w_max)
        ceiling = ctx.ceil_int(maxsum)
        for e in range(lo, hi + 1):
            ctx.add(ctx.pow_int(base, e), ceiling)

    _, exact = ctx.monitored(worst_case)
    return exact


def empirical_precision(request: PrecisionRequest) -> int:
    """Smallest precision on the doubling schedule 1, 2, 4, ... that passes
    :func:`check_precision`.

    The doubling schedule keeps the result within a factor of two of the
    minimal sufficient precision.  The theoretical bound acts as a ceiling:
    if the next doubling would overshoot it, the theoretical value itself is
    used, so the empirical strategy never costs more bits than the
    theoretical one.
    """
    ceiling = theoretical_precision(request)
    p = 1
    while not check_precision(request, p):
        if p >= ceiling:
            raise ConfigurationError(
                f"worst-case precision bound {ceiling} failed its own check; "
                "this indicates a bug or a platform limitation")
        p = min(2 * p, ceiling)
    return p


@lru_cache(maxsize=4096)
def required_precision(request: PrecisionRequest, strategy: str) -> int:
    """Dispatch on the configured strategy name.

    Cached: the empirical search is pure in the request, and mechanisms that
    sample repeatedly under one configuration should not re-run it.
    """
    if strategy == "theoretical":
        return theoretical_precision(request)
    if strategy == "empirical":
        return empirical_precision(request)
    raise InvalidParameterError(
        f"unknown precision strategy {strategy!r}; expected one of {STRATEGIES}")
