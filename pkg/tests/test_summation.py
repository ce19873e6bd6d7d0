"""Summation algorithms against per-element reference folds.

The library executes run-length datasets without expanding them, jumping
across absorption and periodic-drift stretches.  Everything here checks
that shortcut against the one definition that matters: the literal
element-by-element fold.
"""

import random
from fractions import Fraction

from pytest import mark, raises
from hypothesis import given, settings
from hypothesis.strategies import composite, integers, lists, sampled_from

from boundedsum import (
    ALGORITHMS,
    PERMUTATION_ALGORITHM,
    Dataset,
    FloatFormat,
    IntFormat,
    KInt,
    RandomPermutation,
    ROUNDING_MODES,
    ShiftBounds,
    SimFloat,
    SumMethod,
    Truncate,
    add_float,
    add_int,
    bs_exact,
    bs_iterative,
    bs_kahan,
    bs_pairwise,
    bs_split,
    check_multiplication,
    float_overflow_check,
    parse_value,
    random_permutation,
    run_sum,
    truncate,
    values_in_range,
)

F23 = FloatFormat(2, 3)
F34 = FloatFormat(3, 4)
F46 = FloatFormat(4, 6)


# ---------------------------------------------------------------------------
# Reference folds (always element by element)
# ---------------------------------------------------------------------------

def ref_iterative(ds, mode="banker"):
    if isinstance(ds.fmt, FloatFormat):
        acc = SimFloat.zero(ds.fmt)
        for v in ds.iter_values():
            acc = add_float(acc, v, mode)
    else:
        acc = KInt(ds.fmt, 0)
        for v in ds.iter_values():
            acc = add_int(acc, v)
    return acc


def ref_kahan(ds, mode="banker"):
    total = SimFloat.zero(ds.fmt)
    comp = SimFloat.zero(ds.fmt)
    for v in ds.iter_values():
        y = add_float(v, -comp, mode)
        t = add_float(total, y, mode)
        comp = add_float(add_float(t, -total, mode), -y, mode)
        total = t
    return total


def ref_pairwise(ds, mode="banker"):
    values = ds.to_list()
    if not values:
        return ref_iterative(ds, mode)
    if isinstance(ds.fmt, FloatFormat):
        add = lambda a, b: add_float(a, b, mode)
    else:
        add = add_int

    def rec(chunk):
        if len(chunk) == 1:
            return chunk[0]
        m = 1
        while m * 2 < len(chunk):
            m *= 2
        return add(rec(chunk[:m]), rec(chunk[m:]))

    return rec(values)


def ref_split(ds):
    """Sign partition, magnitude-ascending, RTZ partials, banker combine."""
    fmt = ds.fmt
    values = ds.to_list()
    if isinstance(fmt, FloatFormat):
        neg = sorted((v for v in values if v.sign < 0 and not v.is_zero()),
                     key=lambda v: abs(v).to_fraction())
        pos = sorted((v for v in values if not (v.sign < 0 and not v.is_zero())),
                     key=lambda v: v.to_fraction())
        p = SimFloat.zero(fmt)
        for v in pos:
            p = add_float(p, v, "toward_zero")
        n = SimFloat.zero(fmt)
        for v in neg:
            n = add_float(n, v, "toward_zero")
        from boundedsum import round_dyadic
        if p.kind == "inf":
            p = round_dyadic(fmt.max_finite, fmt, "toward_zero")
        if n.kind == "inf":
            n = -round_dyadic(fmt.max_finite, fmt, "toward_zero")
        return add_float(p, n, "banker")
    pos = KInt(fmt, 0)
    for v in sorted((v for v in values if v.value >= 0), key=lambda v: v.value):
        pos = add_int(pos, v)
    neg = KInt(fmt, 0)
    for v in sorted((v for v in values if v.value < 0), key=lambda v: -v.value):
        neg = add_int(neg, v)
    return add_int(pos, neg)


def float_ds(fmt, runs, lo="-8", hi="8"):
    lo, hi = parse_value(fmt, lo), parse_value(fmt, hi)
    return Dataset(fmt, lo, hi, [(parse_value(fmt, v), c) for v, c in runs])


# ---------------------------------------------------------------------------
# Run fast-forward vs the literal fold
# ---------------------------------------------------------------------------

@composite
def small_float_datasets(draw):
    fmt = draw(sampled_from([F23, F34]))
    lo = parse_value(fmt, "-1")
    hi = parse_value(fmt, "1")
    domain = values_in_range(fmt, lo, hi, include_subnormals=True)
    n_runs = draw(integers(min_value=0, max_value=6))
    runs = [(draw(sampled_from(domain)), draw(integers(min_value=1, max_value=30)))
            for _ in range(n_runs)]
    return Dataset(fmt, lo, hi, runs)


@given(small_float_datasets(), sampled_from(ROUNDING_MODES))
@settings(max_examples=200, deadline=None)
def test_iterative_runs_equal_elementwise_fold(ds, mode):
    assert bs_iterative(ds, mode) == ref_iterative(ds, mode)


@given(small_float_datasets())
@settings(max_examples=150, deadline=None)
def test_split_runs_equal_elementwise_fold(ds):
    assert bs_split(ds) == ref_split(ds)


@given(small_float_datasets(), sampled_from(ROUNDING_MODES))
@settings(max_examples=100, deadline=None)
def test_kahan_matches_textbook_recurrence(ds, mode):
    assert bs_kahan(ds, mode) == ref_kahan(ds, mode)


@given(small_float_datasets(), sampled_from(ROUNDING_MODES))
@settings(max_examples=100, deadline=None)
def test_pairwise_matches_reference_tree(ds, mode):
    assert bs_pairwise(ds, mode) == ref_pairwise(ds, mode)


def test_pairwise_split_point():
    # n = 6 must split 4 | 2, not 3 | 3: check against a case where the
    # two trees disagree
    fmt = F23
    lo, hi = parse_value(fmt, "0"), parse_value(fmt, "8")
    vals = [parse_value(fmt, t) for t in ("7", "7", "0.25", "0.25", "0.25", "0.25")]
    ds = Dataset.from_elements(fmt, lo, hi, vals)
    assert bs_pairwise(ds) == ref_pairwise(ds)

    balanced = add_float(
        add_float(add_float(vals[0], vals[1]), vals[2]),
        add_float(add_float(vals[3], vals[4]), vals[5]))
    assert bs_pairwise(ds) != balanced  # the 3|3 tree rounds differently


@mark.parametrize("runs mode".split(), [
    # a constant climb that crosses several binades and finally absorbs
    ([("1", 600)], "banker"),
    ([("1", 600)], "toward_zero"),
    ([("1", 600)], "toward_pos"),
    ([("-1", 600)], "banker"),
    # start high, then a long run of small adds that absorb immediately
    ([("128", 1), ("0.0625", 300)], "banker"),
    # drift region entered partway through a run
    ([("7", 3), ("0.5", 500)], "banker"),
    ([("7", 3), ("0.5", 500)], "toward_pos"),
    # climb out of the subnormal range
    ([("0.001953125", 900)], "banker"),      # 2^-9, subnormal at (4,6)
    # alternating-direction runs
    ([("5", 40), ("-3", 60), ("1.25", 80)], "toward_neg"),
])
def test_fast_forward_stationary_regimes(runs, mode):
    ds = float_ds(F46, runs, lo="-256", hi="256")
    assert bs_iterative(ds, mode) == ref_iterative(ds, mode)


def test_fast_forward_through_saturation():
    # the accumulator reaches infinity mid-run and must stay there
    fmt = F23
    lo, hi = parse_value(fmt, "0"), parse_value(fmt, "14")
    ds = Dataset(fmt, lo, hi, [(parse_value(fmt, "14"), 2000)])
    assert bs_iterative(ds) == ref_iterative(ds)
    assert bs_iterative(ds).kind == "inf"


def test_int_runs_equal_elementwise_fold():
    rng = random.Random(20240811)
    for fmt in (IntFormat(6, True, "wraparound"), IntFormat(6, True, "saturating")):
        lo, hi = KInt(fmt, fmt.min_value), KInt(fmt, fmt.max_value)
        for _ in range(40):
            runs = [(KInt(fmt, rng.randrange(fmt.min_value, fmt.max_value + 1)),
                     rng.randrange(1, 300))
                    for _ in range(rng.randrange(0, 5))]
            ds = Dataset(fmt, lo, hi, runs)
            assert bs_iterative(ds) == ref_iterative(ds)
            assert bs_split(ds) == ref_split(ds)


def test_saturating_run_pins_to_rail():
    fmt = IntFormat(8, True, "saturating")
    ds = Dataset(fmt, KInt(fmt, -128), KInt(fmt, 127), [(KInt(fmt, 100), 50)])
    assert bs_iterative(ds).value == 127
    ds2 = Dataset(fmt, KInt(fmt, -128), KInt(fmt, 127),
                  [(KInt(fmt, -100), 50), (KInt(fmt, 1), 3)])
    assert bs_iterative(ds2).value == -125
    assert bs_iterative(ds2) == ref_iterative(ds2)


# ---------------------------------------------------------------------------
# bs_exact
# ---------------------------------------------------------------------------

@given(small_float_datasets())
@settings(max_examples=60, deadline=None)
def test_exact_float_sum_is_exact(ds):
    want = sum((v.to_fraction() * c for v, c in ds.runs), Fraction(0))
    assert bs_exact(ds).to_fraction() == want


def test_exact_int_sum_is_unbounded():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset(fmt, KInt(fmt, 0), KInt(fmt, 255), [(KInt(fmt, 255), 1000)])
    assert bs_exact(ds) == 255_000  # plain int, no wraparound


def test_exact_never_rounds_where_iterative_does():
    ds = float_ds(F23, [("8", 1), ("0.25", 1)], lo="0", hi="8")
    assert bs_iterative(ds).to_fraction() == 8       # 8.25 is off-grid
    assert bs_exact(ds).to_fraction() == Fraction(33, 4)


# ---------------------------------------------------------------------------
# Split: canonical schedule and clamping
# ---------------------------------------------------------------------------

def test_split_is_order_blind():
    base = [("2", 3), ("-0.5", 5), ("4", 1), ("-2", 2)]
    rng = random.Random(7)
    reference = bs_split(float_ds(F46, base))
    for _ in range(10):
        shuffled = base[:]
        rng.shuffle(shuffled)
        assert bs_split(float_ds(F46, shuffled)) == reference


def test_split_iterative_disagree_on_order():
    # same multiset, two orders: iterative feels it, split does not
    a = float_ds(F23, [("0.25", 8), ("8", 1)], lo="0", hi="8")
    b = float_ds(F23, [("8", 1), ("0.25", 8)], lo="0", hi="8")
    assert bs_iterative(a) != bs_iterative(b)
    assert bs_split(a) == bs_split(b)


def test_split_clamp_events():
    fmt = F23
    lo, hi = parse_value(fmt, "-14"), parse_value(fmt, "14")
    ds = Dataset(fmt, lo, hi, [(parse_value(fmt, "14"), 500)])
    events = []
    out = bs_split(ds, events)
    assert events == ["positive_partial_clamped"]
    assert out.to_fraction() == 14
    ds2 = Dataset(fmt, lo, hi, [(parse_value(fmt, "-14"), 500),
                                (parse_value(fmt, "14"), 500)])
    events2 = []
    out2 = bs_split(ds2, events2)
    assert sorted(events2) == ["negative_partial_clamped",
                               "positive_partial_clamped"]
    assert out2.to_fraction() == 0  # the two clamped rails cancel


def test_run_sum_surfaces_clamp_events():
    fmt = F23
    lo, hi = parse_value(fmt, "0"), parse_value(fmt, "14")
    ds = Dataset(fmt, lo, hi, [(parse_value(fmt, "14"), 500)])
    outcome = run_sum(ds, SumMethod("split"))
    assert outcome.clamp_events == ("positive_partial_clamped",)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def test_truncate_keeps_prefix_and_splits_runs():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset(fmt, KInt(fmt, 0), KInt(fmt, 9),
                 [(KInt(fmt, 3), 4), (KInt(fmt, 5), 2)])
    cut = truncate(ds, 5)
    assert [(v.value, c) for v, c in cut.runs] == [(3, 4), (5, 1)]
    assert truncate(ds, 0).runs == ()
    assert truncate(ds, 99) == ds
    with raises(ValueError):
        truncate(ds, -1)


def test_permutation_depends_only_on_multiset_and_seed():
    fmt = IntFormat(8, False, "wraparound")
    lo, hi = KInt(fmt, 0), KInt(fmt, 99)

    def ds(elems):
        return Dataset.from_elements(fmt, lo, hi, [KInt(fmt, e) for e in elems])

    a = random_permutation(ds([3, 1, 4, 1, 5]), seed=99)
    b = random_permutation(ds([5, 4, 3, 1, 1]), seed=99)
    assert a == b
    assert random_permutation(ds([3, 1, 4, 1, 5]), seed=100) != a


def test_permutation_is_roughly_uniform():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset.from_elements(fmt, KInt(fmt, 0), KInt(fmt, 9),
                               [KInt(fmt, v) for v in (1, 2, 3)])
    counts = {}
    trials = 1200
    for seed in range(trials):
        order = tuple(v.value for v in random_permutation(ds, seed).iter_values())
        counts[order] = counts.get(order, 0) + 1
    assert len(counts) == 6
    expected = trials / 6
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 20.5  # df=5, far beyond any plausible p-value


def test_run_sum_transform_pipeline():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset.from_elements(fmt, KInt(fmt, 0), KInt(fmt, 9),
                               [KInt(fmt, v) for v in (9, 9, 9, 1)])
    plain = run_sum(ds, SumMethod())
    assert plain.value.value == 28
    assert plain.permutation is None and plain.offset is None

    shuffled = run_sum(ds, SumMethod(transforms=(RandomPermutation(5),)))
    assert shuffled.permutation == PERMUTATION_ALGORITHM
    assert shuffled.value.value == 28  # ints: order cannot matter

    cut = run_sum(ds, SumMethod(transforms=(Truncate(2),)))
    assert cut.value.value == 18

    # permute-then-truncate differs from truncate-then-permute in general
    cut_then_perm = run_sum(ds, SumMethod(transforms=(Truncate(1),
                                                      RandomPermutation(0))))
    assert cut_then_perm.value.value == 9


def test_run_sum_shift_bounds():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset.from_elements(fmt, KInt(fmt, 10), KInt(fmt, 20),
                               [KInt(fmt, v) for v in (10, 15, 20)])
    out = run_sum(ds, SumMethod(transforms=(ShiftBounds(),)))
    lower, count = out.offset
    assert (lower.value, count) == (10, 3)
    assert out.value.value == (10 - 10) + (15 - 10) + (20 - 10)
    # the caller reconstructs the true sum in post-processing
    assert out.value.value + lower.value * count == 45


def test_shift_bounds_demands_exactness():
    # span not representable: (2,3) with L = -14, U = 14 has U - L = 28 > 14
    fmt = F23
    ds = Dataset(fmt, parse_value(fmt, "-14"), parse_value(fmt, "14"), ())
    with raises(ValueError):
        run_sum(ds, SumMethod(transforms=(ShiftBounds(),)))


def test_float_shift_bounds_shifts_elements_exactly():
    ds = float_ds(F46, [("2", 2), ("3", 1)], lo="2", hi="4")
    out = run_sum(ds, SumMethod(transforms=(ShiftBounds(),)))
    assert out.value.to_fraction() == Fraction(1)  # (0 + 0 + 1)
    lower, count = out.offset
    assert lower.to_fraction() == 2 and count == 3


def test_unknown_transform_rejected():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset(fmt, KInt(fmt, 0), KInt(fmt, 9), ())
    with raises(TypeError):
        run_sum(ds, SumMethod(transforms=("sort",)))


# ---------------------------------------------------------------------------
# Method descriptions
# ---------------------------------------------------------------------------

def test_algorithm_catalogue():
    assert ALGORITHMS == ("iterative", "pairwise", "kahan", "split", "exact")
    assert "fisher-yates" in PERMUTATION_ALGORITHM


def test_method_validation():
    with raises(ValueError):
        SumMethod("bogus")
    with raises(ValueError):
        SumMethod("iterative", rounding="to-nearest-odd")


def test_method_json_roundtrip():
    methods = [
        SumMethod(),
        SumMethod("split"),
        SumMethod("kahan", "toward_pos"),
        SumMethod("pairwise", transforms=(RandomPermutation(42), Truncate(10))),
        SumMethod("iterative", transforms=(ShiftBounds(),)),
    ]
    for m in methods:
        assert SumMethod.from_json(m.to_json()) == m


def test_kahan_is_float_only():
    fmt = IntFormat(8, False, "wraparound")
    ds = Dataset(fmt, KInt(fmt, 0), KInt(fmt, 9), ())
    with raises(TypeError):
        bs_kahan(ds)


# ---------------------------------------------------------------------------
# Overflow certificates
# ---------------------------------------------------------------------------

def test_check_multiplication():
    fmt = IntFormat(8, True, "saturating")
    assert check_multiplication(KInt(fmt, -2), KInt(fmt, 3), 40, fmt)
    assert not check_multiplication(KInt(fmt, -2), KInt(fmt, 3), 43, fmt)
    assert not check_multiplication(KInt(fmt, -100), KInt(fmt, 1), 2, fmt)
    assert check_multiplication(KInt(fmt, 0), KInt(fmt, 0), 10 ** 9, fmt)


def test_float_overflow_check():
    lo, hi = parse_value(F46, "-1"), parse_value(F46, "1")
    assert float_overflow_check(lo, hi, 100, Fraction(1), F46)
    # (4,6): inf boundary at 2^32; 2^31 elements of magnitude 1 still fit,
    # but the accuracy slack can push the certificate over
    assert not float_overflow_check(lo, hi, 2 ** 33, Fraction(0), F46)
    assert not float_overflow_check(lo, hi, 100, Fraction(2) ** 40, F46)
