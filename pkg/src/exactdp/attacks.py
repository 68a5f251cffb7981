"""Floating-point attacks on a naive double-precision exponential mechanism.

:class:`NaiveExpMech` reproduces the textbook implementation: weights
``exp(-(eps/2)*u)`` in machine doubles, a left-to-right total, normalized
cumulative weights, and a scan for the first cumulative weight at or above a
uniform draw.  Two attacks distinguish adjacent inputs through its arithmetic
artifacts:

* zero rounding - utilities placed where one weight is still a subnormal
  and the next underflows to exactly zero, so one arm of the experiment can
  only ever produce the first outcome;
* truncated addition - a bundle of tiny weights whose additions onto a large
  weight are each a silent no-op, so the large outcome's normalized
  cumulative weight is exactly 1.0 in one arm and about 0.5 in the other.

Both utility functions change by at most 1 per entry between the two arms,
so they would pass any sensitivity audit.  The same experiments run against
the exact base-2 mechanism (after a data-independent shift into the integer
bounds) to demonstrate immunity.

Machine-double arithmetic is confined to this module; nothing here touches
the exact core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .mechanism import MechanismConfig, run_mechanism
from .privacy_params import Eta
from .sampling import BitSource, SampleOptions, resolve_bit_source


class NaiveExpMech:
    """The study target: a faithful naive base-e mechanism in doubles.

    The deterministic part (weights, total, normalized cumulative weights)
    is computed once; each :meth:`sample` draws one uniform threshold and
    scans.  Sums are strict left folds, which is exactly what makes the
    truncated-addition attack work.
    """

    def __init__(self, eps: float, utilities):
        self.eps = eps
        self.utilities = [float(u) for u in utilities]
        self.weights = [float(np.exp(-(eps / 2.0) * u)) for u in self.utilities]
        total = 0.0
        for w in self.weights:
            total = total + w
        self.total = total
        cumulative = []
        acc = 0.0
        for w in self.weights:
            acc = acc + w / total
            cumulative.append(acc)
        self.c_weights = cumulative

    def sample(self, src: BitSource):
        """Index of the first cumulative weight >= a uniform double in
        [0, 1), or None if the scan falls through (all-zero weights)."""
        threshold = src.next_bits(53) * 2.0 ** -53
        for i, c in enumerate(self.c_weights):
            if c >= threshold:
                return i
        return None


def naive_exp_mech(eps: float, utilities, src: BitSource):
    """One draw from the naive mechanism (silently wrong by design)."""
    return NaiveExpMech(eps, utilities).sample(src)


def find_zero_rounding_x(eps: float) -> int:
    """Largest integer x with ``exp(-(eps/2)*x) > 0`` in doubles.

    By monotonicity ``exp(-(eps/2)*(x+1)) == 0.0``, which is the
    zero-rounding attack's lever.
    """
    if eps <= 0:
        raise InvalidParameterError("eps must be positive")
    beta = eps / 2.0

    def positive(x: int) -> bool:
        return float(np.exp(-beta * x)) > 0.0

    hi = 1
    while positive(hi):
        hi *= 2
    lo = hi // 2  # positive(lo) holds
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if positive(mid):
            lo = mid
        else:
            hi = mid
    assert positive(lo) and not positive(lo + 1)
    return lo


@dataclass(frozen=True)
class ZeroRoundingParams:
    """Zero-rounding attack instance: pivot utility x and outcome count."""

    eps: float
    x: int
    n_outcomes: int


@dataclass(frozen=True)
class TruncationParams:
    """Truncated-addition attack instance.

    ``x_l`` anchors the large weight, ``x_s`` the small ones; ``n_outcomes``
    counts the full outcome space (one large plus ``n_outcomes - 1`` small).
    """

    eps: float
    x_l: float
    x_s: float
    n_outcomes: int


@dataclass(frozen=True)
class AttackReport:
    """Result of a distinguishing experiment.

    ``advantage`` is the difference between the target-present and
    target-absent arms' frequencies of the attacked outcome, which equals
    the success probability of the obvious guessing rule minus chance,
    rescaled to [-1, 1].
    """

    attack: str
    mechanism: str
    trials: int
    guesses_correct: int
    advantage: float
    o1_frequency_in: float
    o1_frequency_out: float

    CSV_HEADER = "attack,mechanism,trials,guesses_correct,advantage,o1_freq_in,o1_freq_out"

    def csv_row(self) -> str:
        return (f"{self.attack},{self.mechanism},{self.trials},"
                f"{self.guesses_correct},{self.advantage:.6f},"
                f"{self.o1_frequency_in:.6f},{self.o1_frequency_out:.6f}")

    def summary(self) -> str:
        return (f"{self.attack} attack vs {self.mechanism} mechanism: "
                f"advantage {self.advantage:+.4f} over {self.trials} trials/arm "
                f"(o1 frequency {self.o1_frequency_in:.4f} with target, "
                f"{self.o1_frequency_out:.4f} without)")


def find_truncation_params(eps: float, max_outcomes: int):
    """Search for a truncated-addition instance, or None when eps is too
    small for any outcome budget.

    Candidates are verified directly in doubles: the small weights must
    vanish bit-exactly into the large one (the target-present arm), while in
    the target-absent arm their sum must roughly equal the large weight so
    the first outcome claims only about half of [0, 1].  Small eps makes the
    required outcome count astronomically large, hence the budget.
    """
    if eps <= 0:
        raise InvalidParameterError("eps must be positive")
    beta = eps / 2.0
    x_l = 1.0
    n = 64
    while n <= max_outcomes:
        tail = n - 1
        x_s = x_l + 1.0 + math.log(tail) / beta
        if beta * (x_s + 1.0) < 700.0:  # keep every weight strictly positive
            params = TruncationParams(eps=eps, x_l=x_l, x_s=x_s, n_outcomes=n)
            if _verify_truncation(params):
                return params
        n *= 2
    return None


def _verify_truncation(params: TruncationParams) -> bool:
    beta = params.eps / 2.0
    tail = params.n_outcomes - 1
    w_large = float(np.exp(-beta * params.x_l))
    w_tiny = float(np.exp(-beta * (params.x_s + 1.0)))
    if not (w_large > 0.0 and w_tiny > 0.0):
        return False
    # target-present arm: every tiny addition must be a no-op
    acc = w_large
    for _ in range(tail):
        acc = acc + w_tiny
    if acc != w_large:
        return False
    # target-absent arm: the tail mass must land near the large weight
    w1 = float(np.exp(-beta * (params.x_l + 1.0)))
    w_small = float(np.exp(-beta * params.x_s))
    mass = 0.0
    for _ in range(tail):
        mass = mass + w_small
    return w1 > 0.0 and 0.8 <= mass / w1 <= 1.25


def _attack_arm_utilities(attack, present: bool):
    """The two hypothesized utility lists of an attack instance."""
    if isinstance(attack, ZeroRoundingParams):
        k = attack.n_outcomes
        if present:
            return [float(attack.x)] + [float(attack.x + 1)] * (k - 1)
        return [float(attack.x)] * k
    if isinstance(attack, TruncationParams):
        tail = attack.n_outcomes - 1
        if present:
            return [attack.x_l] + [attack.x_s + 1.0] * tail
        return [attack.x_l + 1.0] + [attack.x_s] * tail
    raise InvalidParameterError(f"unknown attack parameters {attack!r}")


def shifted_exact_utilities(attack, present: bool) -> tuple[list, int]:
    """Attack utilities translated by the data-independent offset that puts
    them at 0, plus the matching integer u_max.  The shift preserves
    per-entry sensitivity exactly."""
    arm = _attack_arm_utilities(attack, present)
    offset = float(attack.x) if isinstance(attack, ZeroRoundingParams) else attack.x_l
    shifted = [u - offset for u in arm]
    spread = (attack.x_s + 1.0 - attack.x_l) if isinstance(attack, TruncationParams) else 1.0
    return shifted, math.ceil(spread)


def _run_arms(attack, trials: int, mechanism: str, src: BitSource,
              eta: Eta = Eta(1, 1, 1)):
    """Frequencies of outcome o1 in the target-present / target-absent arms."""
    hits = {}
    for present in (True, False):
        if mechanism == "naive":
            mech = NaiveExpMech(attack.eps, _attack_arm_utilities(attack, present))
            count = sum(1 for _ in range(trials) if mech.sample(src) == 0)
        elif mechanism == "exact":
            utilities, u_max = shifted_exact_utilities(attack, present)
            cfg = MechanismConfig(u_min=0, u_max=u_max,
                                  o_max=attack.n_outcomes, eta=eta,
                                  opts=SampleOptions())
            outcomes = list(range(attack.n_outcomes))
            count = sum(
                1 for _ in range(trials)
                if run_mechanism(cfg, utilities, outcomes, src) == 0)
        else:
            raise InvalidParameterError(
                f"mechanism must be 'naive' or 'exact', got {mechanism!r}")
        hits[present] = count
    return hits[True], hits[False]


def _report(attack_name: str, mechanism: str, trials: int,
            hits_in: int, hits_out: int) -> AttackReport:
    freq_in = hits_in / trials
    freq_out = hits_out / trials
    return AttackReport(
        attack=attack_name,
        mechanism=mechanism,
        trials=trials,
        guesses_correct=hits_in + (trials - hits_out),
        advantage=freq_in - freq_out,
        o1_frequency_in=freq_in,
        o1_frequency_out=freq_out,
    )


def run_attack_zero(eps: float, n_outcomes: int, trials: int,
                    mechanism: str = "naive", src=None) -> AttackReport:
    """Run the zero-rounding experiment: ``trials`` draws per arm, guessing
    'target present' whenever outcome o1 appears."""
    if n_outcomes < 2:
        raise InvalidParameterError("zero-rounding attack needs >= 2 outcomes")
    src = resolve_bit_source(src)
    params = ZeroRoundingParams(eps=eps, x=find_zero_rounding_x(eps),
                                n_outcomes=n_outcomes)
    hits_in, hits_out = _run_arms(params, trials, mechanism, src)
    return _report("zero-rounding", mechanism, trials, hits_in, hits_out)


def run_attack_truncated(params: TruncationParams, trials: int,
                         mechanism: str = "naive", src=None) -> AttackReport:
    """Run the truncated-addition experiment on verified parameters."""
    src = resolve_bit_source(src)
    hits_in, hits_out = _run_arms(params, trials, mechanism, src)
    return _report("truncated-addition", mechanism, trials, hits_in, hits_out)
