"""Exact base-2 exponential mechanism for differential privacy.

Weights of the form ``(x/2**y)**(z*u)`` are computed in arbitrary-precision
binary floating point with every rounding monitored, and outcomes are drawn
from the exact normalized distribution without division.  The package also
ships the naive double-precision mechanism it replaces together with two
attacks that break it, a clamped discrete Laplace application, and a
benchmark suite.
"""

from .attacks import (
    AttackReport,
    NaiveExpMech,
    TruncationParams,
    ZeroRoundingParams,
    find_truncation_params,
    find_zero_rounding_x,
    naive_exp_mech,
    run_attack_truncated,
    run_attack_zero,
)
from .bench import (
    BenchRecord,
    bench_laplace,
    bench_outcome_scaling,
    bench_precision_method,
    bench_timing_channel,
    bench_utility_range,
    emit_csv,
    read_csv,
    timing_ratio,
)
from .errors import (
    ConfigurationError,
    ExactDPError,
    InexactArithmeticError,
    InsufficientPrecisionError,
    InvalidParameterError,
    RandomnessError,
    SizeViolationError,
)
from .exact_arith import (
    PLATFORM_MAX_PRECISION,
    ArithContext,
    compact,
    ctx_new,
    decompose,
    dyadic,
    mantissa_bits,
    to_fraction,
)
from .laplace import ClampedDiscreteLaplace, LaplaceConfig, clamped_discrete_laplace
from .mechanism import (
    ExponentialMechanism,
    MechanismConfig,
    RRBounds,
    clamp,
    exact_distribution,
    randomized_round,
    rr_bounds,
    run_mechanism,
)
from .precision import (
    PrecisionRequest,
    check_precision,
    empirical_precision,
    required_precision,
    theoretical_precision,
)
from .privacy_params import Eta, eta_new
from .sampling import (
    BitSource,
    CountingBitSource,
    OsBitSource,
    SampleOptions,
    ScriptedBitSource,
    SeededBitSource,
    WeightTable,
    get_random_value,
    normalized_sample,
    resolve_bit_source,
    total_and_cumulative,
)

__version__ = "0.1.0"

__all__ = [
    "ArithContext",
    "AttackReport",
    "BenchRecord",
    "BitSource",
    "ClampedDiscreteLaplace",
    "ConfigurationError",
    "CountingBitSource",
    "Eta",
    "ExactDPError",
    "ExponentialMechanism",
    "InexactArithmeticError",
    "InsufficientPrecisionError",
    "InvalidParameterError",
    "LaplaceConfig",
    "MechanismConfig",
    "NaiveExpMech",
    "OsBitSource",
    "PLATFORM_MAX_PRECISION",
    "PrecisionRequest",
    "RRBounds",
    "RandomnessError",
    "SampleOptions",
    "ScriptedBitSource",
    "SeededBitSource",
    "SizeViolationError",
    "TruncationParams",
    "WeightTable",
    "ZeroRoundingParams",
    "bench_laplace",
    "bench_outcome_scaling",
    "bench_precision_method",
    "bench_timing_channel",
    "bench_utility_range",
    "check_precision",
    "clamp",
    "clamped_discrete_laplace",
    "compact",
    "ctx_new",
    "decompose",
    "dyadic",
    "emit_csv",
    "empirical_precision",
    "eta_new",
    "exact_distribution",
    "find_truncation_params",
    "find_zero_rounding_x",
    "get_random_value",
    "mantissa_bits",
    "naive_exp_mech",
    "normalized_sample",
    "randomized_round",
    "read_csv",
    "required_precision",
    "resolve_bit_source",
    "rr_bounds",
    "run_attack_truncated",
    "run_attack_zero",
    "run_mechanism",
    "theoretical_precision",
    "timing_ratio",
    "to_fraction",
    "total_and_cumulative",
]
