"""Exact dyadic arithmetic against the Fraction oracle."""

import math
from fractions import Fraction

from pytest import raises
from hypothesis import given
from hypothesis.strategies import fractions, integers

from boundedsum import Dyadic, floor_log2_fraction
from boundedsum.dyadic import DYADIC_ONE, DYADIC_ZERO

mantissas = integers(min_value=-(1 << 70), max_value=1 << 70)
exponents = integers(min_value=-80, max_value=80)


def dy(m, e):
    return Dyadic(m, e)


# ---------------------------------------------------------------------------
# Construction and normal form
# ---------------------------------------------------------------------------

def test_normal_form_mantissa_is_odd_or_zero():
    assert Dyadic(4, 0) == Dyadic(1, 2)
    assert Dyadic(12, -2) == Dyadic(3, 0)
    assert Dyadic(0, 37) == DYADIC_ZERO
    x = Dyadic(96, -5)
    assert x.m % 2 == 1


@given(mantissas, exponents)
def test_value_preserved_by_normalization(m, e):
    assert dy(m, e).to_fraction() == Fraction(m) * Fraction(2) ** e


def test_from_int():
    assert Dyadic.from_int(10).to_fraction() == 10
    assert Dyadic.from_int(-7) == Dyadic(-7, 0)
    assert Dyadic.from_int(0).is_zero()


@given(fractions(max_denominator=1 << 20))
def test_from_fraction_accepts_exactly_the_dyadics(f):
    den = f.denominator
    if den & (den - 1) == 0:
        assert Dyadic.from_fraction(f).to_fraction() == f
    else:
        with raises(ValueError):
            Dyadic.from_fraction(f)


def test_from_fraction_rejects_third():
    with raises(ValueError):
        Dyadic.from_fraction(Fraction(1, 3))


# ---------------------------------------------------------------------------
# Ring operations vs Fraction
# ---------------------------------------------------------------------------

@given(mantissas, exponents, mantissas, exponents)
def test_add_sub_mul_match_fractions(ma, ea, mb, eb):
    a, b = dy(ma, ea), dy(mb, eb)
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb


@given(mantissas, exponents, integers(min_value=-50, max_value=50))
def test_int_scalar_multiplication(m, e, c):
    a = dy(m, e)
    assert (a * c).to_fraction() == a.to_fraction() * c


@given(mantissas, exponents)
def test_negation_and_abs(m, e):
    a = dy(m, e)
    assert (-a).to_fraction() == -a.to_fraction()
    assert abs(a).to_fraction() == abs(a.to_fraction())


@given(mantissas, exponents, mantissas, exponents)
def test_comparisons_match_fractions(ma, ea, mb, eb):
    a, b = dy(ma, ea), dy(mb, eb)
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a == b) == (fa == fb)
    assert (a < b) == (fa < fb)
    assert (a <= b) == (fa <= fb)
    assert (a > b) == (fa > fb)
    assert (a >= b) == (fa >= fb)


def test_identities():
    x = Dyadic(5, -3)
    assert x + DYADIC_ZERO == x
    assert x * DYADIC_ONE == x
    assert x - x == DYADIC_ZERO
    assert (x * DYADIC_ZERO).is_zero()


# ---------------------------------------------------------------------------
# Structure queries
# ---------------------------------------------------------------------------

@given(mantissas, exponents)
def test_floor_log2(m, e):
    a = dy(m, e)
    if a.is_zero():
        with raises(ValueError):
            a.floor_log2()
        return
    b = a.floor_log2()
    mag = abs(a.to_fraction())
    assert Fraction(2) ** b <= mag < Fraction(2) ** (b + 1)


@given(fractions(max_denominator=10 ** 9, min_value=Fraction(1, 10 ** 9)))
def test_floor_log2_fraction(f):
    b = floor_log2_fraction(f)
    assert Fraction(2) ** b <= f < Fraction(2) ** (b + 1)


def test_is_power_of_two():
    assert Dyadic(1, 5).is_power_of_two()
    assert Dyadic(1, -9).is_power_of_two()
    assert not Dyadic(3, 0).is_power_of_two()
    assert not Dyadic(-1, 2).is_power_of_two()
    assert not DYADIC_ZERO.is_power_of_two()


def test_sign():
    assert Dyadic(3, -1).sign == 1
    assert Dyadic(-3, -1).sign == -1
    assert DYADIC_ZERO.sign == 0


@given(mantissas, exponents, integers(min_value=-90, max_value=90))
def test_scaled_and_divides_grid(m, e, grid):
    a = dy(m, e)
    fr = a.to_fraction() / Fraction(2) ** grid
    if a.divides_grid(grid):
        got = a.scaled(grid)
        assert isinstance(got, int)
        assert got == fr
    else:
        assert fr.denominator != 1


def test_to_float_small_values():
    assert Dyadic(3, -2).to_float() == 0.75
    assert Dyadic(-1, 10).to_float() == -1024.0
    assert DYADIC_ZERO.to_float() == 0.0


@given(integers(min_value=-(1 << 40), max_value=1 << 40),
       integers(min_value=-40, max_value=40))
def test_to_float_agrees_with_math(m, e):
    a = dy(m, e)
    assert a.to_float() == m * math.ldexp(1.0, e)


def test_str_uses_power_notation():
    assert str(Dyadic(3, -2)) == "3*2^-2"
    assert str(Dyadic(-5, 4)) == "-5*2^4"
