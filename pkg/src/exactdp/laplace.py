"""Clamped discrete Laplace noise via the exact exponential mechanism.

The outcome space is a fixed dyadic grid ``{lower + i*gamma <= upper}``
declared before the target value is observed; the utility of a grid point is
its distance to the (clamped) target.  Randomized rounding absorbs the
fractional part of the distances, so the grid granularity can be far finer
than the integer utility range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import InvalidParameterError
from .mechanism import MechanismConfig, clamp, run_mechanism
from .privacy_params import Eta
from .sampling import SampleOptions, resolve_bit_source


def _as_dyadic(value) -> Fraction:
    frac = Fraction(value)
    den = frac.denominator
    if den & (den - 1):
        raise InvalidParameterError(
            f"granularity must be a dyadic rational, got {value!r} "
            f"(denominator {den})")
    return frac


@dataclass(frozen=True)
class LaplaceConfig:
    """Grid bounds, granularity and privacy/sampling parameters.

    ``gamma`` must be a positive dyadic rational (a power of two keeps the
    grid aligned with the weight arithmetic and is recommended) so grid
    points and distances are exactly representable.
    """

    lower: float
    upper: float
    gamma: object
    eta: Eta
    opts: SampleOptions = field(default_factory=SampleOptions)
    precision_strategy: str = "theoretical"

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidParameterError("bounds must be finite")
        if not self.lower < self.upper:
            raise InvalidParameterError(
                f"lower ({self.lower}) must be below upper ({self.upper})")
        gamma = _as_dyadic(self.gamma)
        if gamma <= 0:
            raise InvalidParameterError(f"gamma must be positive, got {self.gamma!r}")

    def grid(self) -> list[float]:
        """The outcome grid, exact double-precision values."""
        gamma = _as_dyadic(self.gamma)
        lo = Fraction(self.lower)
        hi = Fraction(self.upper)
        count = (hi - lo) // gamma + 1
        points = []
        for i in range(count):
            point = lo + i * gamma
            as_float = float(point)
            if Fraction(as_float) != point:
                raise InvalidParameterError(
                    f"grid point {point} is not exactly representable as a "
                    "double; use a coarser gamma or tighter bounds")
            points.append(as_float)
        return points

    def mechanism_config(self) -> MechanismConfig:
        grid = self.grid()
        u_max = math.ceil(Fraction(self.upper) - Fraction(self.lower))
        return MechanismConfig(
            u_min=0, u_max=u_max, o_max=len(grid), eta=self.eta,
            opts=self.opts, precision_strategy=self.precision_strategy)


def laplace_utilities(cfg: LaplaceConfig, target: float) -> list[Fraction]:
    """Exact distances ``|target - o|`` over the grid, with the target first
    clamped into the declared bounds."""
    clamped = clamp(Fraction(target), Fraction(cfg.lower), Fraction(cfg.upper))
    return [abs(clamped - Fraction(o)) for o in cfg.grid()]


def clamped_discrete_laplace(cfg: LaplaceConfig, target: float, src) -> float:
    """Draw one grid point with probability proportional to
    ``2**(-eta * |target - o|)`` (after randomized rounding of the
    distances)."""
    if isinstance(target, float) and not math.isfinite(target):
        raise InvalidParameterError("target must be finite")
    mech_cfg = cfg.mechanism_config()
    return run_mechanism(mech_cfg, laplace_utilities(cfg, target), cfg.grid(), src)


class ClampedDiscreteLaplace(BaseEstimator):
    """Estimator-style clamped discrete Laplace mechanism.

    Declare the grid and privacy level up front, :meth:`fit` the private
    target value, then :meth:`sample` grid points.

    >>> lap = ClampedDiscreteLaplace(eta=(1, 1, 1), lower=-4, upper=4, gamma=0.25)
    >>> lap.fit(0.0).sample(random_state=3)
    -0.5
    """

    def __init__(self, eta=(1, 1, 1), lower=-10.0, upper=10.0, gamma=2 ** -4,
                 k=1, variant="full-scan", precision_strategy="theoretical"):
        self.eta = eta
        self.lower = lower
        self.upper = upper
        self.gamma = gamma
        self.k = k
        self.variant = variant
        self.precision_strategy = precision_strategy

    def _config(self) -> LaplaceConfig:
        eta = self.eta if isinstance(self.eta, Eta) else Eta(*self.eta)
        return LaplaceConfig(
            lower=self.lower, upper=self.upper, gamma=self.gamma, eta=eta,
            opts=SampleOptions(k=self.k, variant=self.variant),
            precision_strategy=self.precision_strategy)

    def fit(self, target, y=None):
        """Attach the private target value.  The grid, bounds and working
        precision are fixed by the constructor parameters alone."""
        config = self._config()
        mech_config = config.mechanism_config()
        mech_config.working_precision()
        if isinstance(target, float) and not math.isfinite(target):
            raise InvalidParameterError("target must be finite")
        self.config_ = config
        self.mechanism_config_ = mech_config
        self.grid_ = config.grid()
        self.utilities_ = laplace_utilities(config, target)
        return self

    def sample(self, n_samples=None, random_state=None):
        """Draw one grid point (``n_samples=None``) or a list of them."""
        if not hasattr(self, "config_"):
            raise NotFittedError(
                f"{type(self).__name__} must be fitted before sampling")
        src = resolve_bit_source(random_state)
        if n_samples is None:
            return run_mechanism(self.mechanism_config_, self.utilities_,
                                 self.grid_, src)
        return [run_mechanism(self.mechanism_config_, self.utilities_,
                              self.grid_, src) for _ in range(n_samples)]
