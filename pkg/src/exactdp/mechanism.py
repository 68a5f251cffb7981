"""The base-2 exponential mechanism.

Given data-independent bounds (integer utility range, maximum outcome count,
privacy parameter) and a list of real-valued utilities, the mechanism clamps
each utility into range, rounds non-integer utilities to an integer proxy by
an unbiased coin flip, computes the weights ``base**u`` exactly, and samples
an outcome index without division.  Every arithmetic phase is verified
exact; a rounded result is never returned silently.

The privacy guarantee, for a caller-attested sensitivity-1 utility list, is
a probability ratio of at most ``2**(2*eta)`` between adjacent inputs
(``epsilon = 2*ln(2)*eta`` on the conventional scale).  Sensitivity of the
utility function is the caller's responsibility and is not verified here.

:class:`ExponentialMechanism` wraps the functional core in a scikit-learn
style estimator (``get_params`` / ``fit`` / ``sample``) so it composes with
that ecosystem's tooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import (
    InexactArithmeticError,
    InvalidParameterError,
    SizeViolationError,
)
from .exact_arith import ArithContext, compact_for_storage, dyadic, to_fraction
from .precision import STRATEGIES, PrecisionRequest, required_precision
from .privacy_params import Eta
from .sampling import (
    BitSource,
    SampleOptions,
    normalized_sample,
    resolve_bit_source,
    total_and_cumulative,
)


@dataclass(frozen=True)
class MechanismConfig:
    """Everything the mechanism needs that must not depend on the data.

    All fields are fixed before any utility is examined; the working
    precision is a pure function of this configuration.
    """

    u_min: int
    u_max: int
    o_max: int
    eta: Eta
    opts: SampleOptions = field(default_factory=SampleOptions)
    precision_strategy: str = "theoretical"
    rounding_bits: int = 64

    def __post_init__(self):
        # PrecisionRequest re-validates the bounds; build it eagerly so a bad
        # configuration fails at construction time.
        self.precision_request()
        if self.precision_strategy not in STRATEGIES:
            raise InvalidParameterError(
                f"unknown precision strategy {self.precision_strategy!r}; "
                f"expected one of {STRATEGIES}")
        if not isinstance(self.rounding_bits, int) or self.rounding_bits < 1:
            raise InvalidParameterError("rounding_bits must be an integer >= 1")

    def precision_request(self) -> PrecisionRequest:
        return PrecisionRequest(self.u_min, self.u_max, self.o_max, self.eta)

    def working_precision(self) -> int:
        return required_precision(self.precision_request(), self.precision_strategy)


def clamp(u, lo, hi):
    """Project ``u`` into ``[lo, hi]``.  Clamping to a data-independent range
    never increases the sensitivity of a utility function."""
    if lo > hi:
        raise InvalidParameterError(f"clamp range is empty: [{lo}, {hi}]")
    return min(max(lo, u), hi)


def _round_with_coin(u, coin: int, bits: int) -> int:
    """Integer proxy for ``u`` decided by a ``bits``-bit coin.

    Rounds up when ``coin / 2**bits`` falls below the fractional part of
    ``u``, so the proxy is ``ceil(u)`` with probability ``u - floor(u)`` (to
    within ``2**-bits``, and exactly when the fraction is a dyadic of at most
    ``bits`` bits).  The comparison is done in integers; no arithmetic here
    can round.
    """
    floor_u = math.floor(u)
    frac = u - floor_u
    if frac == 0:
        return floor_u
    num, den = frac.as_integer_ratio()
    # coin / 2**bits < num / den, cross-multiplied
    if coin * den < num << bits:
        return floor_u + 1
    return floor_u


def randomized_round(u, src: BitSource, bits: int = 64) -> int:
    """Round ``u`` to an integer, up with probability equal to its fractional
    part.  Integers pass through without consuming randomness.

    The privacy of the surrounding mechanism does not depend on ``bits``:
    any fixed coin still yields a sensitivity-preserving proxy, so the coin
    precision trades accuracy only.
    """
    if isinstance(u, float) and not math.isfinite(u):
        raise InvalidParameterError(f"cannot round non-finite utility {u!r}")
    if u == math.floor(u):
        return math.floor(u)
    return _round_with_coin(u, src.next_bits(bits), bits)


def _validated_inputs(cfg: MechanismConfig, utilities, outcomes):
    utilities = list(utilities)
    outcomes = list(outcomes)
    if len(utilities) != len(outcomes):
        raise InvalidParameterError(
            f"{len(utilities)} utilities for {len(outcomes)} outcomes")
    if not outcomes:
        raise InvalidParameterError("outcome list is empty")
    if len(outcomes) > cfg.o_max:
        raise SizeViolationError(
            f"{len(outcomes)} outcomes exceed the declared maximum {cfg.o_max}")
    for u in utilities:
        if isinstance(u, float) and not math.isfinite(u):
            raise InvalidParameterError(f"utility {u!r} is not finite")
    return utilities, outcomes


def _clamped_proxies(cfg: MechanismConfig, utilities, src: BitSource) -> list[int]:
    """Clamp and round every utility.

    One coin per outcome slot is carved out of a single batched draw whether
    or not the utility needs rounding, so the number of random bits consumed
    here is a function of the outcome count alone, never of the utility
    values.
    """
    bits = cfg.rounding_bits
    block = src.next_bits(len(utilities) * bits)
    mask = (1 << bits) - 1
    proxies = []
    for i, u in enumerate(utilities):
        coin = (block >> ((len(utilities) - 1 - i) * bits)) & mask
        proxies.append(_round_with_coin(clamp(u, cfg.u_min, cfg.u_max),
                                        coin, bits))
    return proxies


def _weight_table(cfg: MechanismConfig, ctx: ArithContext, proxies):
    """Exact weights ``base**(proxy - shift)`` and their cumulative table.

    The shift (nonzero only for negative utility bounds) scales every weight
    by the same power of the base, leaving the sampled distribution
    untouched while keeping all exponents nonnegative.
    """
    shift = min(cfg.u_min, 0)

    def weights():
        base = ctx.pow_int(dyadic(cfg.eta.x, -cfg.eta.y), cfg.eta.z)
        # the exact re-size keeps o_max working-precision values from
        # dominating memory on large instances
        return [compact_for_storage(ctx.pow_int(base, proxy - shift), ctx.precision)
                for proxy in proxies]

    ws, exact = ctx.monitored(weights)
    if not exact:
        raise InexactArithmeticError(
            f"weight computation was inexact at {ctx.precision} bits; the "
            "declared bounds or the precision determination are wrong")
    return total_and_cumulative(ctx, ws)


def run_mechanism(cfg: MechanismConfig, utilities, outcomes, src: BitSource):
    """One complete mechanism invocation; returns an element of ``outcomes``.

    Order of operations: working precision from the configuration alone,
    then clamping, randomized rounding, exact weights, cumulative sums, and
    division-free sampling.  Raises a typed error instead of returning
    anything if an arithmetic step rounds or the sampler cannot decide.

    Reentrant: every invocation builds private state, so concurrent calls
    are safe as long as each has its own bit source.
    """
    p = cfg.working_precision()
    utilities, outcomes = _validated_inputs(cfg, utilities, outcomes)
    ctx = ArithContext(p)
    proxies = _clamped_proxies(cfg, utilities, src)
    table = _weight_table(cfg, ctx, proxies)
    index = normalized_sample(table, p, cfg.opts, src)
    return outcomes[index]


def exact_distribution(cfg: MechanismConfig, utilities) -> list[Fraction]:
    """The mechanism's exact output distribution for integer utilities.

    Clamps, computes the weight table exactly, and returns each outcome's
    probability as a rational number.  This is the audit surface: privacy
    ratios can be verified on it with zero numerical error.  Utilities must
    already be integers (randomized rounding is a per-run coin, so a single
    distribution only exists once proxies are fixed).
    """
    rounded = []
    for u in utilities:
        c = clamp(u, cfg.u_min, cfg.u_max)
        if c != math.floor(c):
            raise InvalidParameterError(
                "exact_distribution requires integer utilities; round first")
        rounded.append(math.floor(c))
    ctx = ArithContext(cfg.working_precision())
    table = _weight_table(cfg, ctx, rounded)
    total = to_fraction(table.total)
    return [to_fraction(w) / total for w in table.weights]


@dataclass(frozen=True)
class RRBounds:
    """Accuracy report for randomized rounding against the unrounded
    mechanism: per-outcome lower bounds ``q``, their total slack ``A``, the
    target outcome's deviation ``B``, and the pointwise error bound
    ``A + |B|``."""

    lower_bounds: tuple
    slack: float
    deviation: float
    pointwise_bound: float


def rr_bounds(eps, utilities, target_index: int) -> RRBounds:
    """Bound how far randomized rounding moves the probability of one outcome.

    ``eps`` is the weight decay rate (``weights ~ exp(-eps * u)``); pass an
    :class:`Eta` to use its base-e equivalent.  Ordinary floating point is
    fine here: these bounds are for reporting, they play no role in the
    sampled distribution.
    """
    if isinstance(eps, Eta):
        eps = eps.to_epsilon()
    utilities = list(utilities)
    if not utilities:
        raise InvalidParameterError("utilities must not be empty")
    if not 0 <= target_index < len(utilities):
        raise InvalidParameterError(f"target index {target_index} out of range")

    p_down = [abs(u - math.ceil(u)) for u in utilities]
    expected_weight = [
        pd * math.exp(-eps * math.floor(u)) + (1.0 - pd) * math.exp(-eps * math.ceil(u))
        for u, pd in zip(utilities, p_down)
    ]
    total_expected = sum(expected_weight)

    lower = []
    for u, pd, ew in zip(utilities, p_down, expected_weight):
        others = total_expected - ew
        w_down = math.exp(-eps * math.floor(u))
        w_up = math.exp(-eps * math.ceil(u))
        lower.append(pd * w_down / (w_down + others)
                     + (1.0 - pd) * w_up / (w_up + others))

    slack = 1.0 - sum(lower)
    unrounded = [math.exp(-eps * u) for u in utilities]
    target_exact = unrounded[target_index] / sum(unrounded)
    deviation = target_exact - lower[target_index]
    return RRBounds(tuple(lower), slack, deviation, slack + abs(deviation))


class ExponentialMechanism(BaseEstimator):
    """Estimator-style front end for the exact base-2 exponential mechanism.

    Parameters are the data-independent configuration; :meth:`fit` takes the
    outcome list and the (private) utilities; :meth:`sample` draws outcomes.
    Each sample is a full independent mechanism run, including fresh
    randomized rounding of any non-integer utilities.

    >>> mech = ExponentialMechanism(eta=(1, 1, 1), u_min=0, u_max=10, o_max=10)
    >>> mech.fit(range(10), utility_fn=abs).sample(random_state=7)
    0
    """

    def __init__(self, eta=(1, 1, 1), u_min=0, u_max=1, o_max=1, k=1,
                 variant="full-scan", precision_strategy="theoretical",
                 rounding_bits=64):
        self.eta = eta
        self.u_min = u_min
        self.u_max = u_max
        self.o_max = o_max
        self.k = k
        self.variant = variant
        self.precision_strategy = precision_strategy
        self.rounding_bits = rounding_bits

    def _config(self) -> MechanismConfig:
        eta = self.eta if isinstance(self.eta, Eta) else Eta(*self.eta)
        return MechanismConfig(
            u_min=self.u_min, u_max=self.u_max, o_max=self.o_max, eta=eta,
            opts=SampleOptions(k=self.k, variant=self.variant),
            precision_strategy=self.precision_strategy,
            rounding_bits=self.rounding_bits)

    def fit(self, outcomes, utilities=None, *, utility_fn=None):
        """Validate and attach the outcome space and its utilities.

        Either pass ``utilities`` (one real per outcome) or ``utility_fn``,
        which is evaluated once per outcome.  The configuration, including
        the working precision, is resolved before the utilities are looked
        at.
        """
        config = self._config()
        precision = config.working_precision()
        outcomes = list(outcomes)
        if utility_fn is not None:
            if utilities is not None:
                raise InvalidParameterError(
                    "pass either utilities or utility_fn, not both")
            utilities = [utility_fn(o) for o in outcomes]
        if utilities is None:
            raise InvalidParameterError("utilities are required to fit")
        utilities, outcomes = _validated_inputs(config, utilities, outcomes)
        self.config_ = config
        self.working_precision_ = precision
        self.outcomes_ = outcomes
        self.utilities_ = utilities
        return self

    def _check_fitted(self):
        if not hasattr(self, "config_"):
            raise NotFittedError(
                f"{type(self).__name__} must be fitted before sampling")

    def sample(self, n_samples=None, random_state=None):
        """Draw one outcome (``n_samples=None``) or a list of outcomes.

        ``random_state`` may be ``None`` (OS randomness), an integer seed,
        or a :class:`BitSource`.
        """
        self._check_fitted()
        src = resolve_bit_source(random_state)
        if n_samples is None:
            return run_mechanism(self.config_, self.utilities_, self.outcomes_, src)
        return [run_mechanism(self.config_, self.utilities_, self.outcomes_, src)
                for _ in range(n_samples)]

    def exact_distribution(self) -> list[Fraction]:
        """Exact output probabilities, available when utilities are integers."""
        self._check_fitted()
        return exact_distribution(self.config_, self.utilities_)
