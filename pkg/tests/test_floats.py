"""Emulated floats checked two independent ways.

The 64-bit configuration is compared bit-for-bit against the host's
doubles (whose additions round to nearest, ties to even).  The tiny
configurations are checked exhaustively against a from-scratch rounding
oracle that knows nothing about the implementation: it enumerates every
finite value of the format and picks the right neighbour by definition.
"""

import struct
from fractions import Fraction

from pytest import mark, raises
from hypothesis import given, settings
from hypothesis.strategies import floats, integers, sampled_from

from boundedsum import (
    FLOAT32,
    FLOAT64,
    ROUNDING_MODES,
    Dyadic,
    FloatFormat,
    InvalidOperation,
    SimFloat,
    add_float,
    is_representable,
    parse_value,
    round_dyadic,
    to_exact,
    ulp,
    values_in_range,
)

F23 = FloatFormat(2, 3)
F34 = FloatFormat(3, 4)


# ---------------------------------------------------------------------------
# Reference machinery
# ---------------------------------------------------------------------------

def finite_values(fmt):
    """Every distinct finite value of ``fmt`` (``-0`` folded away)."""
    out = {}
    for bits in range(1 << fmt.total_bits):
        try:
            x = SimFloat(fmt, bits)
        except ValueError:
            continue  # NaN patterns
        if x.kind == "inf":
            continue
        out[x.bits] = x
    return sorted(out.values(), key=lambda x: x.to_fraction())


def oracle_round(q: Fraction, fmt: FloatFormat, mode: str, table) -> SimFloat:
    """Independent rounding: choose among the format's values by definition.

    The infinity working value ``2^(emax+1)`` participates as an ordinary
    grid point with an even mantissa; whatever lands on or beyond it is
    infinite.
    """
    values, parity = table
    inf_v = fmt.inf_value.to_fraction()
    if abs(q) >= inf_v:
        return SimFloat.inf(fmt, 1 if q > 0 else -1)
    grid = values + [inf_v, -inf_v]
    if mode == "banker":
        best = min(abs(q - v) for v in grid)
        near = [v for v in grid if abs(q - v) == best]
        pick = near[0] if len(near) == 1 else \
            next(v for v in near if parity[v] == 0)
    elif mode == "toward_zero":
        pick = max((v for v in grid if 0 <= v <= q or q <= v <= 0),
                   key=abs, default=Fraction(0))
    elif mode == "toward_pos":
        pick = min(v for v in grid if v >= q)
    else:  # toward_neg
        pick = max(v for v in grid if v <= q)
    if abs(pick) == inf_v:
        return SimFloat.inf(fmt, 1 if pick > 0 else -1)
    return round_dyadic(Dyadic.from_fraction(pick), fmt, "toward_zero")


def rounding_table(fmt):
    vals = finite_values(fmt)
    fractions = [x.to_fraction() for x in vals]
    parity = {x.to_fraction(): x.mantissa & 1 for x in vals}
    parity[fmt.inf_value.to_fraction()] = 0
    parity[-fmt.inf_value.to_fraction()] = 0
    return fractions, parity


TABLE23 = rounding_table(F23)


# ---------------------------------------------------------------------------
# 64-bit configuration vs the host's doubles
# ---------------------------------------------------------------------------

def from_double(x: float) -> SimFloat:
    return SimFloat(FLOAT64, struct.unpack("<Q", struct.pack("<d", x))[0])


reasonable_doubles = floats(allow_nan=False, allow_infinity=False)


@given(reasonable_doubles)
def test_float64_bit_pattern_roundtrip(x):
    assert float(from_double(x)) == x or (x == 0.0)


@given(reasonable_doubles, reasonable_doubles)
@settings(max_examples=300)
def test_float64_addition_matches_hardware(x, y):
    got = add_float(from_double(x), from_double(y), "banker")
    want = from_double(x + y)
    assert got == want


@given(reasonable_doubles)
def test_float64_exact_value(x):
    f = from_double(x)
    if f.is_zero():
        assert x == 0.0
    else:
        assert f.to_fraction() == Fraction(x)


def test_float64_format_constants():
    assert FLOAT64.k == 52
    assert FLOAT64.bias == 1023
    assert (FLOAT64.emin, FLOAT64.emax) == (-1022, 1023)
    assert FLOAT64.total_bits == 64
    assert FLOAT64.min_normal.to_fraction() == Fraction(2) ** -1022
    assert FLOAT64.min_subnormal.to_fraction() == Fraction(2) ** -1074
    assert FLOAT64.max_finite.to_fraction() == \
        (2 - Fraction(2) ** -52) * Fraction(2) ** 1023
    assert FLOAT32.k == 23 and FLOAT32.emax == 127


def test_format_validation():
    with raises(ValueError):
        FloatFormat(0, 3)
    with raises(ValueError):
        FloatFormat(2, 1)


# ---------------------------------------------------------------------------
# Exhaustive tiny-format checks
# ---------------------------------------------------------------------------

def test_tiny_format_constants():
    # l = 3: fields 1..6 are normal, so emax = 3 and emin = -2
    assert (F23.emin, F23.emax) == (-2, 3)
    assert F23.inf_value.to_fraction() == 16
    assert F23.max_finite.to_fraction() == Fraction(14)
    assert F23.min_normal.to_fraction() == Fraction(1, 4)
    assert F23.min_subnormal.to_fraction() == Fraction(1, 16)


@mark.parametrize("mode", ROUNDING_MODES)
def test_addition_exhaustive_against_oracle(mode):
    vals = finite_values(F23)
    for x in vals:
        for y in vals:
            got = add_float(x, y, mode)
            want = oracle_round(x.to_fraction() + y.to_fraction(),
                                F23, mode, TABLE23)
            assert got == want, (str(x), str(y), mode)


@mark.parametrize("mode", ROUNDING_MODES)
def test_round_dyadic_off_grid_sweep(mode):
    # thirty-seconds sweep across the whole range, including the overflow
    # band between max_finite (14) and the infinity working value (16)
    for i in range(-520, 521):
        q = Fraction(i, 32)
        got = round_dyadic(Dyadic.from_fraction(q), F23, mode)
        assert got == oracle_round(q, F23, mode, TABLE23), (q, mode)


def test_overflow_band_choices():
    inf = SimFloat.inf(F23)
    top = parse_value(F23, "14")
    # the midpoint 15 ties; infinity's mantissa counts as even
    assert round_dyadic(Dyadic.from_fraction(Fraction(15)), F23, "banker") == inf
    assert round_dyadic(Dyadic.from_fraction(Fraction(119, 8)), F23,
                        "banker") == top
    assert round_dyadic(Dyadic.from_fraction(Fraction(121, 8)), F23,
                        "toward_zero") == top
    assert round_dyadic(Dyadic.from_fraction(Fraction(121, 8)), F23,
                        "toward_pos") == inf
    # at or past the working value every mode saturates, in both directions
    assert round_dyadic(Dyadic.from_fraction(Fraction(16)), F23,
                        "toward_zero") == inf
    assert round_dyadic(Dyadic.from_fraction(Fraction(-33, 2)), F23,
                        "toward_pos") == SimFloat.inf(F23, -1)


def test_infinity_saturates_addition():
    inf = SimFloat.inf(F23)
    one = parse_value(F23, "1")
    assert add_float(inf, one) == inf
    assert add_float(one, -inf) == -inf
    assert add_float(inf, inf) == inf
    with raises(InvalidOperation):
        add_float(inf, -inf)


def test_ulp_exhaustive():
    for x in finite_values(F23):
        spacing = ulp(x).to_fraction()
        if x.kind in ("zero", "subnormal"):
            assert spacing == Fraction(2) ** (F23.emin - F23.k)
        else:
            assert spacing == Fraction(2) ** (x.exponent - F23.k)
    with raises(ValueError):
        ulp(SimFloat.inf(F23))


def test_to_exact_matches_fraction():
    for x in finite_values(F34):
        assert to_exact(x).to_fraction() == x.to_fraction()


# ---------------------------------------------------------------------------
# Representability and enumeration
# ---------------------------------------------------------------------------

def test_is_representable_cases():
    assert is_representable(Fraction(1, 4), F23)
    assert is_representable(Fraction(1, 16), F23)   # subnormal
    assert is_representable(14, F23)
    assert not is_representable(Fraction(1, 32), F23)
    assert not is_representable(15, F23)            # off the top grid
    assert not is_representable(16, F23)
    assert not is_representable(Fraction(1, 3), F23)
    assert is_representable(Dyadic(0), F23)


def test_is_representable_agrees_with_enumeration():
    reachable = {x.to_fraction() for x in finite_values(F23)}
    for i in range(-600, 601):
        q = Fraction(i, 32)
        assert is_representable(q, F23) == (q in reachable), q


def test_values_in_range_normal_only():
    lo, hi = parse_value(F23, "-2"), parse_value(F23, "2")
    got = values_in_range(F23, lo, hi)
    fracs = [x.to_fraction() for x in got]
    assert fracs == sorted(fracs)
    assert all(-2 <= f <= 2 for f in fracs)
    assert Fraction(0) in fracs
    # no subnormals unless requested, but zero stays eligible
    assert Fraction(1, 16) not in fracs
    with_sub = values_in_range(F23, lo, hi, include_subnormals=True)
    assert Fraction(1, 16) in [x.to_fraction() for x in with_sub]
    want = [x.to_fraction() for x in finite_values(F23)
            if -2 <= x.to_fraction() <= 2 and x.kind != "subnormal"]
    assert fracs == want


# ---------------------------------------------------------------------------
# Construction, parsing, printing
# ---------------------------------------------------------------------------

def test_nan_patterns_rejected():
    # exponent field all ones + nonzero mantissa
    with raises(ValueError):
        SimFloat(F23, 0b0_111_01)
    with raises(ValueError):
        SimFloat(F23, 1 << 6)


def test_negative_zero_folds():
    minus_zero = 1 << (F23.total_bits - 1)
    assert SimFloat(F23, minus_zero).bits == 0
    assert SimFloat(F23, minus_zero) == SimFloat.zero(F23)


def test_from_parts_validation():
    with raises(ValueError):
        SimFloat.from_parts(F23, 1, 9, 0)        # exponent out of range
    with raises(ValueError):
        SimFloat.from_parts(F23, 1, 0, 4)        # mantissa field too wide
    with raises(ValueError):
        SimFloat.from_parts(F23, 1, 0, 1, subnormal=True)
    x = SimFloat.from_parts(F23, -1, 1, 2)
    assert x.to_fraction() == -(1 + Fraction(2, 4)) * 2


@given(integers(min_value=0, max_value=(1 << 6) - 1))
def test_hex_roundtrip(bits):
    try:
        x = SimFloat(F23, bits)
    except ValueError:
        return
    assert SimFloat.from_hex(F23, x.to_hex()) == x


@mark.parametrize("text want".split(),
                  [("0", Fraction(0)),
                   ("0.75", Fraction(3, 4)),
                   ("-2", Fraction(-2)),
                   ("3*2^-2", Fraction(3, 4)),
                   ("-5*2^0", Fraction(-5)),
                   ("14", Fraction(14))])
def test_parse_value_exact_inputs(text, want):
    assert parse_value(F23, text).to_fraction() == want


def test_parse_value_special_and_hex():
    assert parse_value(F23, "inf") == SimFloat.inf(F23)
    assert parse_value(F23, "-inf") == SimFloat.inf(F23, -1)
    x = parse_value(F23, "1.5")
    assert parse_value(F23, x.to_hex()) == x


@mark.parametrize("text", ["0.1", "15", "1/3", "0.03125"])
def test_parse_value_rejects_unrepresentable(text):
    with raises(ValueError):
        parse_value(F23, text)


def test_str_forms():
    assert str(SimFloat.zero(F23)) == "0"
    assert str(SimFloat.inf(F23, -1)) == "-inf"
    assert str(parse_value(F23, "0.75")) == "3*2^-2"


@given(sampled_from(finite_values(F34)), sampled_from(finite_values(F34)))
def test_addition_is_commutative(x, y):
    for mode in ROUNDING_MODES:
        assert add_float(x, y, mode) == add_float(y, x, mode)
