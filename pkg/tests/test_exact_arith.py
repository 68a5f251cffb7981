from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import exactdp as x
from exactdp.errors import ConfigurationError


class TestContextConstruction:
    def test_fresh_context_has_clear_flags(self):
        ctx = x.ctx_new(53)
        assert ctx.precision == 53
        assert ctx.flags == frozenset()
        assert ctx.was_exact()

    def test_zero_precision_rejected(self):
        with pytest.raises(ConfigurationError):
            x.ctx_new(0)

    def test_negative_and_non_integer_precision_rejected(self):
        with pytest.raises(ConfigurationError):
            x.ctx_new(-5)
        with pytest.raises(ConfigurationError):
            x.ctx_new(53.0)

    def test_beyond_platform_maximum_rejected(self):
        with pytest.raises(ConfigurationError):
            x.ctx_new(x.PLATFORM_MAX_PRECISION + 1)

    def test_547_bit_context_usable(self):
        # the worst-case precision for bounds (0, 16) with 513 outcomes at
        # eta = 1; the weight workload must run exactly there
        ctx = x.ctx_new(547)
        base = x.Eta(1, 1, 1).base(ctx)

        def workload():
            w_small = ctx.pow_int(base, 16)
            total = ctx.zero()
            for _ in range(513):
                total = ctx.add(total, ctx.pow_int(base, 0))
            return ctx.add(w_small, total)

        _, exact = ctx.monitored(workload)
        assert exact


class TestAdd:
    def test_sum_of_nearby_dyadics_is_exact(self):
        ctx = x.ctx_new(53)
        result = ctx.add(x.dyadic(1, -40), x.dyadic(1, -42))
        assert x.to_fraction(result) == Fraction(5, 2 ** 42)
        assert ctx.was_exact()

    def test_magnitude_gap_truncates_and_flags(self):
        # five mantissa bits cannot absorb a value 2**11 times smaller
        ctx = x.ctx_new(5)
        big = x.dyadic(0b11111, 3)
        tiny = x.dyadic(1, -3)
        result = ctx.add(big, tiny)
        assert result == big
        assert "inexact" in ctx.flags

    def test_add_zero_identity(self):
        ctx = x.ctx_new(7)
        w = x.dyadic(97, -5)
        assert ctx.add(w, ctx.zero()) == w
        assert ctx.was_exact()

    def test_sub_and_mul(self):
        ctx = x.ctx_new(24)
        assert x.to_fraction(ctx.sub(x.dyadic(3, -1), x.dyadic(1, -2))) == Fraction(5, 4)
        assert x.to_fraction(ctx.mul(x.dyadic(3, -2), x.dyadic(5, -1))) == Fraction(15, 8)
        assert ctx.was_exact()

    def test_fsum_flags_truncation(self):
        ctx = x.ctx_new(5)
        ctx.fsum([x.dyadic(31, 0), x.dyadic(1, -3)])
        assert not ctx.was_exact()


class TestPowInt:
    def test_half_cubed(self):
        ctx = x.ctx_new(10)
        assert x.to_fraction(ctx.pow_int(x.dyadic(1, -1), 3)) == Fraction(1, 8)
        assert ctx.was_exact()

    def test_fifteen_sixteenths_squared(self):
        ctx = x.ctx_new(8)
        result = ctx.pow_int(x.dyadic(15, -4), 2)
        assert x.to_fraction(result) == Fraction(15, 16) ** 2
        assert ctx.was_exact()

    def test_zero_exponent_is_one(self):
        ctx = x.ctx_new(3)
        assert ctx.pow_int(x.dyadic(11, -4), 0) == 1
        assert ctx.was_exact()

    def test_negative_exponent_rejected(self):
        ctx = x.ctx_new(10)
        with pytest.raises(ValueError):
            ctx.pow_int(x.dyadic(1, -1), -1)

    def test_insufficient_precision_flags(self):
        ctx = x.ctx_new(4)
        ctx.pow_int(x.dyadic(15, -4), 2)  # needs 8 bits
        assert not ctx.was_exact()


class TestMonitored:
    def test_many_exact_additions(self):
        ctx = x.ctx_new(32)

        def run():
            total = ctx.zero()
            for _ in range(100):
                total = ctx.add(total, x.dyadic(1, -3))
            return total

        result, exact = ctx.monitored(run)
        assert exact
        assert x.to_fraction(result) == Fraction(100, 8)

    def test_single_truncation_reported(self):
        ctx = x.ctx_new(5)
        _, exact = ctx.monitored(ctx.add, x.dyadic(31, 0), x.dyadic(1, -3))
        assert not exact

    def test_monitored_clears_previous_flags(self):
        ctx = x.ctx_new(5)
        ctx.add(x.dyadic(31, 0), x.dyadic(1, -3))
        assert not ctx.was_exact()
        _, exact = ctx.monitored(ctx.add, x.dyadic(1, 0), x.dyadic(1, 0))
        assert exact

    def test_flags_accumulate_until_cleared(self):
        ctx = x.ctx_new(5)
        ctx.clear_flags()
        ctx.add(x.dyadic(1, 0), x.dyadic(1, 0))
        assert ctx.was_exact()
        ctx.add(x.dyadic(31, 0), x.dyadic(1, -3))
        ctx.add(x.dyadic(1, 0), x.dyadic(1, 0))
        assert not ctx.was_exact()  # the earlier truncation is still visible


class TestHelpers:
    def test_compare(self):
        ctx = x.ctx_new(8)
        assert ctx.compare(x.dyadic(1, -1), x.dyadic(3, -2)) == -1
        assert ctx.compare(x.dyadic(3, -2), x.dyadic(1, -1)) == 1
        assert ctx.compare(x.dyadic(4, -3), x.dyadic(1, -1)) == 0

    def test_compare_is_exact_across_precisions(self):
        a = x.dyadic(2 ** 60 + 1, 0)
        b = x.dyadic(2 ** 60, 0)
        assert x.ArithContext.compare(a, b) == 1

    def test_ceil_int_exact_beyond_context_precision(self):
        ctx = x.ctx_new(4)
        v = x.dyadic(2 ** 30 + 1, -1)
        assert ctx.ceil_int(v) == 2 ** 29 + 1

    def test_from_int(self):
        ctx = x.ctx_new(8)
        assert ctx.from_int(200) == 200
        assert ctx.was_exact()
        ctx.from_int(2 ** 20 + 1)
        assert not ctx.was_exact()

    def test_exp2(self):
        ctx = x.ctx_new(2)
        assert x.to_fraction(ctx.exp2(-5)) == Fraction(1, 32)
        assert ctx.was_exact()


@given(m=st.integers(1, 2 ** 16 - 1), e=st.integers(-200, 200))
def test_dyadic_decompose_roundtrip(m, e):
    value = x.dyadic(m, e)
    m2, e2 = x.decompose(value)
    assert m2 % 2 == 1
    assert Fraction(m, 1) * Fraction(2) ** e == Fraction(m2) * Fraction(2) ** e2
    recon = x.dyadic(m2, e2)
    assert recon == value
    assert x.compact(value) == value
    assert x.mantissa_bits(value) == m2.bit_length()


@given(
    m1=st.integers(1, 2 ** 12), e1=st.integers(-40, 40),
    m2=st.integers(1, 2 ** 12), e2=st.integers(-40, 40),
)
def test_add_exact_when_sum_fits(m1, e1, m2, e2):
    # with precision equal to the true sum's mantissa size, add must be exact
    # and agree with rational arithmetic
    a, b = Fraction(m1) * Fraction(2) ** e1, Fraction(m2) * Fraction(2) ** e2
    total = a + b
    needed = total.numerator.bit_length() - (total.numerator & -total.numerator).bit_length() + 1
    ctx = x.ctx_new(max(needed, 1))
    result, exact = ctx.monitored(ctx.add, dy(a), dy(b))
    assert exact
    assert x.to_fraction(result) == total


def dy(frac):
    return x.dyadic(frac.numerator, -(frac.denominator.bit_length() - 1))


@settings(max_examples=60)
@given(m=st.integers(1, 63), e=st.integers(-8, 8), n=st.integers(0, 64))
def test_pow_exact_at_product_precision(m, e, n):
    base = Fraction(m) * Fraction(2) ** e
    bits = m.bit_length() - (m & -m).bit_length() + 1
    ctx = x.ctx_new(max(1, bits * max(n, 1)))
    result, exact = ctx.monitored(ctx.pow_int, dy(base), n)
    assert exact
    assert x.to_fraction(result) == base ** n
