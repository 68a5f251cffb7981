"""Shared helpers: exact dyadic table construction and grid enumeration."""

from fractions import Fraction

import pytest

import exactdp as x


def dyadic_mpfr(frac):
    """Exact mpfr for a dyadic Fraction."""
    frac = Fraction(frac)
    den = frac.denominator
    assert den & (den - 1) == 0, f"{frac} is not dyadic"
    return x.dyadic(frac.numerator, -(den.bit_length() - 1))


def make_table(fracs, ctx_bits=96):
    """WeightTable from dyadic Fractions, built at a comfortable precision."""
    ctx = x.ArithContext(ctx_bits)
    return x.total_and_cumulative(ctx, [dyadic_mpfr(f) for f in fracs])


def table_fractions(table):
    return [x.to_fraction(w) for w in table.weights]


def enumerate_sampler(table, p, variants=("standard", "full-scan", "optimized")):
    """Drive the sampler through every grid point below the total.

    Returns per-index counts.  Asserts that all requested variants agree on
    every point (no restart can occur because only in-range points are fed).
    """
    t = x.to_fraction(table.total)
    unit = Fraction(2) ** (table.g - p - 1)
    counts = [0] * len(table)
    units = 0
    while units * unit < t:
        bits = format(units, f"0{p + 1}b")
        chosen = {
            x.normalized_sample(table, p, x.SampleOptions(variant=v),
                                x.ScriptedBitSource(bits))
            for v in variants
        }
        assert len(chosen) == 1, f"variants disagree on bits {bits}: {chosen}"
        counts[chosen.pop()] += 1
        units += 1
    return counts, unit


@pytest.fixture
def seeded():
    return lambda n=0: x.SeededBitSource(0xE0_0000 + n)
