"""Command-line interface.

Subcommands: ``sample`` (one exact mechanism draw), ``laplace`` (clamped
discrete Laplace draws, one grid point per line), ``attack`` (distinguishing
experiments against the naive or exact mechanism), and ``bench`` (benchmark
scenarios with CSV output).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bench as bench_mod
from .attacks import (
    AttackReport,
    find_truncation_params,
    run_attack_truncated,
    run_attack_zero,
)
from .errors import ExactDPError
from .laplace import LaplaceConfig, clamped_discrete_laplace
from .mechanism import MechanismConfig, run_mechanism
from .privacy_params import Eta
from .sampling import SampleOptions, resolve_bit_source


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for deterministic bits (default: OS randomness)")
    parser.add_argument("--csv", default=None, help="write results to this CSV file")
    parser.add_argument("--json", action="store_true",
                        help="print reports as JSON")


def _add_sample_parser(sub):
    p = sub.add_parser("sample", help="draw one outcome from the exact mechanism")
    p.add_argument("--eta", type=Eta.parse, required=True, metavar="X,Y,Z",
                   help="privacy parameter triple, e.g. 1,1,1")
    p.add_argument("--umin", type=int, required=True, help="minimum utility bound")
    p.add_argument("--umax", type=int, required=True, help="maximum utility bound")
    p.add_argument("--omax", type=int, required=True, help="maximum outcome count")
    p.add_argument("--utilities", required=True,
                   help="file with one real utility per line")
    p.add_argument("--outcomes", default=None,
                   help="file with one outcome label per line (default: indices)")
    p.add_argument("--k", type=int, default=1, help="minimum rejection retries")
    p.add_argument("--variant", default="full-scan",
                   choices=("standard", "full-scan", "optimized"))
    p.add_argument("--precision-strategy", default="theoretical",
                   choices=("theoretical", "empirical"))
    _common_flags(p)


def _add_laplace_parser(sub):
    p = sub.add_parser("laplace", help="clamped discrete Laplace over a dyadic grid")
    p.add_argument("--eta", type=Eta.parse, required=True, metavar="X,Y,Z")
    p.add_argument("--lower", type=float, required=True)
    p.add_argument("--upper", type=float, required=True)
    p.add_argument("--gamma", type=Fraction, required=True,
                   help="grid granularity, e.g. 0.03125 or 1/32 "
                        "(dyadic; a power of two is recommended)")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--samples", type=int, default=1,
                   help="number of draws, one grid point per line")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--variant", default="full-scan",
                   choices=("standard", "full-scan", "optimized"))
    p.add_argument("--precision-strategy", default="theoretical",
                   choices=("theoretical", "empirical"))
    _common_flags(p)


def _add_attack_parser(sub):
    p = sub.add_parser("attack", help="floating-point attack experiments")
    p.add_argument("kind", choices=("zero", "truncated"))
    p.add_argument("--eps", type=float, required=True,
                   help="base-e privacy parameter of the attacked mechanism")
    p.add_argument("--outcomes", type=int, default=10,
                   help="outcome count (zero) or outcome budget (truncated)")
    p.add_argument("--trials", type=int, default=1000, help="trials per arm")
    p.add_argument("--target", default="naive", choices=("naive", "exact"),
                   help="which mechanism to attack")
    _common_flags(p)


def _add_bench_parser(sub):
    p = sub.add_parser("bench", help="benchmark scenarios")
    p.add_argument("scenario", choices=("outcome-scaling", "utility-range",
                                        "precision-method", "laplace",
                                        "timing-channel"))
    p.add_argument("--sizes", default=None,
                   help="comma-separated instance sizes (scenario-specific default)")
    p.add_argument("--reps", type=int, default=None, help="repetitions per instance")
    p.add_argument("--configs", default=None,
                   help="comma-separated config labels (naive,base2,optimized,empirical)")
    p.add_argument("--k-values", default="1,2,4,8,16",
                   help="timing-channel: comma-separated minimum retry counts")
    p.add_argument("--batch", type=int, default=4,
                   help="timing-channel: mechanism calls per timing record")
    _common_flags(p)


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _cmd_sample(args) -> int:
    utilities = [float(line) for line in _read_lines(args.utilities)]
    if args.outcomes is not None:
        outcomes = _read_lines(args.outcomes)
    else:
        outcomes = list(range(len(utilities)))
    cfg = MechanismConfig(
        u_min=args.umin, u_max=args.umax, o_max=args.omax, eta=args.eta,
        opts=SampleOptions(k=args.k, variant=args.variant),
        precision_strategy=args.precision_strategy)
    outcome = run_mechanism(cfg, utilities, outcomes, resolve_bit_source(args.seed))
    epsilon = 2.0 * args.eta.to_epsilon()
    if args.json:
        print(json.dumps({"outcome": outcome, "epsilon_reporting_only": epsilon}))
    else:
        print(outcome)
        print(f"# epsilon (base-e equivalent, reporting only): {epsilon:.6f}",
              file=sys.stderr)
    return 0


def _cmd_laplace(args) -> int:
    cfg = LaplaceConfig(
        lower=args.lower, upper=args.upper, gamma=args.gamma, eta=args.eta,
        opts=SampleOptions(k=args.k, variant=args.variant),
        precision_strategy=args.precision_strategy)
    src = resolve_bit_source(args.seed)
    draws = [clamped_discrete_laplace(cfg, args.target, src)
             for _ in range(args.samples)]
    if args.json:
        print(json.dumps({"samples": draws,
                          "epsilon_reporting_only": 2.0 * args.eta.to_epsilon()}))
    else:
        for value in draws:
            print(value)
    return 0


def _attack_report_out(report: AttackReport, args) -> None:
    if args.json:
        print(json.dumps(report.__dict__))
    else:
        print(report.summary())
        print(AttackReport.CSV_HEADER)
        print(report.csv_row())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(AttackReport.CSV_HEADER + "\n" + report.csv_row() + "\n")


def _cmd_attack(args) -> int:
    src = resolve_bit_source(args.seed)
    if args.kind == "zero":
        report = run_attack_zero(args.eps, args.outcomes, args.trials,
                                 mechanism=args.target, src=src)
    else:
        params = find_truncation_params(args.eps, args.outcomes)
        if params is None:
            print(f"infeasible: eps={args.eps} admits no truncated-addition "
                  f"instance within {args.outcomes} outcomes", file=sys.stderr)
            return 1
        print(f"# derived instance: x_l={params.x_l}, x_s={params.x_s:.6f}, "
              f"outcomes={params.n_outcomes}", file=sys.stderr)
        report = run_attack_truncated(params, args.trials,
                                      mechanism=args.target, src=src)
    _attack_report_out(report, args)
    return 0


_BENCH_DEFAULTS = {
    "outcome-scaling": ([100, 1000, 10000], 3, ("naive", "base2")),
    "utility-range": ([0, 1000, 10000], 3, ("base2", "optimized")),
    "precision-method": ([100, 1000, 10000], 3, ("base2", "empirical")),
    "laplace": ([2 ** -2, 2 ** -3, 2 ** -4, 2 ** -5], 3,
                ("naive", "base2", "empirical")),
}


def _cmd_bench(args) -> int:
    if args.scenario == "timing-channel":
        k_values = [int(v) for v in args.k_values.split(",")]
        reps = args.reps if args.reps is not None else 200
        records = bench_mod.bench_timing_channel(k_values, reps=reps,
                                                 batch=args.batch)
        for k in k_values:
            print(f"k={k}: median time ratio (rejecting/non-rejecting) = "
                  f"{bench_mod.timing_ratio(records, k):.3f}")
    else:
        default_sizes, default_reps, default_configs = _BENCH_DEFAULTS[args.scenario]
        sizes = default_sizes if args.sizes is None else \
            [Fraction(v) if args.scenario == "laplace" else int(v)
             for v in args.sizes.split(",")]
        reps = args.reps if args.reps is not None else default_reps
        configs = default_configs if args.configs is None else \
            tuple(args.configs.split(","))
        runner = {
            "outcome-scaling": lambda: bench_mod.bench_outcome_scaling(
                sizes, reps, configs, seed=args.seed),
            "utility-range": lambda: bench_mod.bench_utility_range(
                sizes, reps, configs, seed=args.seed),
            "precision-method": lambda: bench_mod.bench_precision_method(
                sizes, reps, seed=args.seed),
            "laplace": lambda: bench_mod.bench_laplace(
                sizes, reps, configs, seed=args.seed),
        }[args.scenario]
        records = runner()
    path = args.csv or f"bench-{args.scenario}.csv"
    bench_mod.emit_csv(records, path)
    print(f"# {len(records)} records written to {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="exactdp",
        description="Exact base-2 exponential mechanism: sampling, attacks, "
                    "benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_sample_parser(sub)
    _add_laplace_parser(sub)
    _add_attack_parser(sub)
    _add_bench_parser(sub)
    args = parser.parse_args(argv)
    handler = {
        "sample": _cmd_sample,
        "laplace": _cmd_laplace,
        "attack": _cmd_attack,
        "bench": _cmd_bench,
    }[args.command]
    try:
        return handler(args)
    except ExactDPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
