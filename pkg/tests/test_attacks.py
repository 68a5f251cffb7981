import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

import exactdp as x
from exactdp.attacks import (
    NaiveExpMech,
    TruncationParams,
    find_truncation_params,
    find_zero_rounding_x,
    naive_exp_mech,
    run_attack_truncated,
    run_attack_zero,
    shifted_exact_utilities,
)
from exactdp.errors import InvalidParameterError


class TestNaiveMechanism:
    def test_overwhelming_weight(self):
        src = x.SeededBitSource(1)
        for _ in range(50):
            assert naive_exp_mech(2.0, [0, 1000], src) == 0

    def test_equal_utilities_uniform(self):
        mech = NaiveExpMech(2.0, [5.0] * 5)
        src = x.SeededBitSource(2)
        tally = [0] * 5
        for _ in range(5000):
            tally[mech.sample(src)] += 1
        _, p_value = stats.chisquare(tally)
        assert p_value > 1e-3

    def test_underflow_pins_first_outcome(self):
        # the documented double-precision edge: exp(-745) is the smallest
        # positive subnormal, exp(-746) underflows to zero
        assert float(np.exp(-745.0)) > 0.0
        assert float(np.exp(-746.0)) == 0.0
        mech = NaiveExpMech(2.0, [745.0, 746.0, 746.0, 746.0])
        assert mech.weights[1:] == [0.0, 0.0, 0.0]
        src = x.SeededBitSource(3)
        for _ in range(200):
            assert mech.sample(src) == 0


class TestZeroRoundingSearch:
    def test_eps_two(self):
        assert find_zero_rounding_x(2.0) == 745

    def test_eps_one_scales(self):
        assert find_zero_rounding_x(1.0) == 1490

    def test_postcondition(self):
        for eps in (0.5, 2.0, 7.0):
            xv = find_zero_rounding_x(eps)
            assert float(np.exp(-(eps / 2) * xv)) > 0.0
            assert float(np.exp(-(eps / 2) * (xv + 1))) == 0.0

    def test_invalid_eps(self):
        with pytest.raises(InvalidParameterError):
            find_zero_rounding_x(0.0)


class TestAttackZero:
    def test_naive_advantage_near_theory(self):
        report = run_attack_zero(2.0, 10, 600, mechanism="naive",
                                 src=x.SeededBitSource(10))
        assert report.o1_frequency_in == 1.0
        assert abs(report.o1_frequency_out - 0.1) < 0.05
        assert report.advantage >= 0.8  # theory: (k-1)/k = 0.9

    def test_two_outcomes_half_advantage(self):
        report = run_attack_zero(2.0, 2, 800, mechanism="naive",
                                 src=x.SeededBitSource(11))
        assert abs(report.advantage - 0.5) < 0.08

    def test_exact_mechanism_resists(self):
        report = run_attack_zero(2.0, 10, 500, mechanism="exact",
                                 src=x.SeededBitSource(12))
        assert report.advantage < 0.3

    def test_exact_arm_ratio_bounded(self):
        cfg = x.MechanismConfig(u_min=0, u_max=1, o_max=10, eta=x.Eta(1, 1, 1))
        with_target = x.exact_distribution(cfg, [0] + [1] * 9)
        without = x.exact_distribution(cfg, [0] * 10)
        for a, b in zip(with_target, without):
            assert max(a / b, b / a) <= 4

    def test_report_accounting(self):
        report = run_attack_zero(2.0, 4, 100, mechanism="naive",
                                 src=x.SeededBitSource(13))
        assert report.guesses_correct == round(
            report.o1_frequency_in * 100 + (1 - report.o1_frequency_out) * 100)
        assert -1 <= report.advantage <= 1
        assert report.csv_row().startswith("zero-rounding,naive,100,")


class TestTruncationSearch:
    def test_eps_thirty_feasible(self):
        params = find_truncation_params(30.0, 4096)
        assert params is not None
        assert params.n_outcomes <= 4096
        beta = 15.0
        w_large = float(np.exp(-beta * params.x_l))
        w_tiny = float(np.exp(-beta * (params.x_s + 1)))
        assert w_tiny > 0.0
        acc = w_large
        for _ in range(params.n_outcomes - 1):
            acc += w_tiny
        assert acc == w_large  # additions are bit-exact no-ops
        tail_mass = (params.n_outcomes - 1) * float(np.exp(-beta * params.x_s))
        assert 0.7 <= tail_mass / float(np.exp(-beta * (params.x_l + 1))) <= 1.3

    def test_all_weights_positive(self):
        params = find_truncation_params(30.0, 4096)
        for present in (True, False):
            mech = NaiveExpMech(params.eps,
                                _arm(params, present))
            assert all(w > 0.0 for w in mech.weights)

    def test_small_eps_infeasible(self):
        assert find_truncation_params(1.0, 10 ** 6) is None

    def test_invalid_eps(self):
        with pytest.raises(InvalidParameterError):
            find_truncation_params(-1.0, 100)


def _arm(params, present):
    from exactdp.attacks import _attack_arm_utilities
    return _attack_arm_utilities(params, present)


@pytest.fixture(scope="module")
def params():
    return find_truncation_params(30.0, 4096)


class TestAttackTruncated:

    def test_naive_arms(self, params):
        report = run_attack_truncated(params, 2000, mechanism="naive",
                                      src=x.SeededBitSource(20))
        assert report.o1_frequency_in == 1.0
        assert abs(report.o1_frequency_out - 0.5) < 0.05

    def test_shifted_utilities_fit_bounds(self, params):
        for present in (True, False):
            shifted, u_max = shifted_exact_utilities(params, present)
            assert min(shifted) >= 0.0
            assert max(shifted) <= u_max

    def test_exact_mechanism_coupled_ratio(self, params):
        # one coin decides both arms' tail rounding (their fractional parts
        # are equal), so verifying both rounding patterns bounds the mixture
        spread = params.x_s + 1 - params.x_l
        assert (spread % 1) == ((spread - 1) % 1)
        n = params.n_outcomes
        base = Fraction(1, 2)
        for d in (math.floor(spread), math.ceil(spread)):
            t_in = 1 + (n - 1) * base ** d
            t_out = base + (n - 1) * base ** (d - 1)
            for w_in, w_out in ((Fraction(1), base),
                                (base ** d, base ** (d - 1))):
                ratio = (w_in / t_in) / (w_out / t_out)
                assert Fraction(1, 4) <= ratio <= 4

    def test_exact_mechanism_runs(self, params):
        report = run_attack_truncated(params, 20, mechanism="exact",
                                      src=x.SeededBitSource(21))
        assert 0 <= report.o1_frequency_in <= 1

    def test_summary_format(self, params):
        report = run_attack_truncated(params, 50, mechanism="naive",
                                      src=x.SeededBitSource(22))
        assert "truncated-addition" in report.summary()
        assert report.csv_row().count(",") == 6


class TestArmConstruction:
    def test_sensitivity_one_per_entry(self):
        params = TruncationParams(eps=30.0, x_l=1.0, x_s=2.5, n_outcomes=8)
        present = _arm(params, True)
        absent = _arm(params, False)
        assert all(abs(a - b) == 1.0 for a, b in zip(present, absent))
        shifted_p, _ = shifted_exact_utilities(params, True)
        shifted_a, _ = shifted_exact_utilities(params, False)
        assert all(abs(a - b) == 1.0 for a, b in zip(shifted_p, shifted_a))
