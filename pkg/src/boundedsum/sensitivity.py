"""Sensitivity bounds for bounded sums, and the oracles that check them.

Three layers live here:

1. :func:`idealized_sensitivity` — what the textbook analysis over the
   reals gives: ``max(|L|, U)`` for the add/remove metrics, ``U - L`` for
   the replace-one metrics.  Finite arithmetic can exceed these, which is
   the whole story this package tells.

2. :func:`implemented_sensitivity_bound` — certified upper bounds on the
   sensitivity of an actual summation method over the emulated type,
   dispatching on (format, overflow policy, algorithm, transforms,
   metric).  Each supported combination maps to one named rule; anything
   outside the proven territory raises :class:`UnsupportedCombination`
   rather than guessing, and a combination whose premise fails (overflow
   not excluded, size unknown, missing permutation) raises
   :class:`PreconditionFailed`.

3. :func:`brute_force_sensitivity` — the ground truth: enumerate every
   dataset over the representable values inside the bounds, release each
   one once, and maximize the release gap over adjacent pairs.  Only
   feasible for tiny formats, which is exactly where it is used to
   sandwich the analytic bounds between attack lower bounds and the
   certified upper bounds.

The coupling constructions near the bottom turn unordered adjacency into
ordered adjacency after a random permutation; they are what lets the
ordered-metric bounds serve the add/remove world.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .data import Dataset, ElementFormat, Value, _value_cmp_key
from .dyadic import Dyadic, floor_log2_fraction
from .floats import (FloatFormat, SimFloat, is_representable, round_dyadic,
                     values_in_range)
from .ints import IntFormat, KInt
from .metrics import d_mod
from .summation import (RandomPermutation, ShiftBounds, SumMethod, Truncate,
                        check_multiplication, float_overflow_check, run_sum)

__all__ = [
    "METRICS", "SensSpec", "SensitivityBound", "BruteForceResult",
    "Recommendation", "PreconditionFailed", "UnsupportedCombination",
    "idealized_sensitivity", "modular_sensitivity_bound", "accuracy_bound",
    "implemented_sensitivity_bound", "brute_force_sensitivity",
    "couple_sym", "couple_co", "recommend", "KAHAN_ACCURACY_CONSTANT",
]

METRICS = ("sym", "co", "ham", "id")
UNORDERED_METRICS = ("sym", "co")
KNOWN_N_METRICS = ("co", "ham")

# Constant in the compensated-summation error bound (2t + C*n*t^2)*n*max.
# The classical analysis leaves the constant unnamed; this value is pinned
# by the exhaustive small-format checks in the test suite.
KAHAN_ACCURACY_CONSTANT = 8


class PreconditionFailed(ValueError):
    """A stated precondition of the requested operation does not hold."""


class UnsupportedCombination(ValueError):
    """No certified bound exists for this method/metric combination."""


@dataclass(frozen=True)
class SensSpec:
    """What sensitivity question is being asked.

    ``n`` is the exact dataset size for the known-size metrics (``co``,
    ``ham``) and the size cap for brute force under ``sym``/``id``.
    ``checked`` asserts the caller verifies the no-overflow product
    condition before running the mechanism.
    """

    fmt: ElementFormat
    lower: Value
    upper: Value
    metric: str
    method: SumMethod = SumMethod()
    n: Optional[int] = None
    checked: bool = False

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        Dataset._check_value(self.fmt, self.lower, "lower bound")
        Dataset._check_value(self.fmt, self.upper, "upper bound")
        if _fr(self.lower) > _fr(self.upper):
            raise ValueError("lower bound exceeds upper bound")
        if self.n is not None and self.n < 0:
            raise ValueError("n must be nonnegative")


@dataclass(frozen=True)
class SensitivityBound:
    """An upper bound plus where it came from.

    ``output_metric`` says how distances between *releases* are measured:
    ``abs`` for ordinary absolute difference, ``mod`` when the bound only
    holds for the wraparound distance on residues (and the noise must be
    folded onto the same residue circle).  ``details`` carries
    rule-specific extras, e.g. the coarse constant-factor form of the
    split bounds or the accuracy term that was doubled in.
    """

    value: Fraction
    rule: str
    output_metric: str = "abs"
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, (Fraction, Dyadic)) else v
        return {"value": str(self.value), "rule": self.rule,
                "output_metric": self.output_metric,
                "details": {k: enc(v) for k, v in sorted(self.details.items())}}


def _fr(v: Value) -> Fraction:
    return v.to_dyadic().to_fraction() if isinstance(v, SimFloat) else Fraction(v.value)


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


# ---------------------------------------------------------------------------
# Idealized and modular bounds
# ---------------------------------------------------------------------------

def idealized_sensitivity(spec: SensSpec) -> SensitivityBound:
    """Real-arithmetic sensitivity of the bounded sum.

    ``sym``/``id``: adding or removing one element moves the sum by at
    most ``max(|L|, U)``, and that is achieved.  ``co``/``ham``:
    replacing one element moves it by at most ``U - L``, also achieved.
    """
    lo, hi = _fr(spec.lower), _fr(spec.upper)
    if spec.metric in ("sym", "id"):
        value = max(abs(lo), abs(hi))
    else:
        value = hi - lo
    return SensitivityBound(value=value, rule=f"idealized-{spec.metric}")


def modular_sensitivity_bound(spec: SensSpec) -> SensitivityBound:
    """Sensitivity of the wraparound sum in wrap distance on residues.

    Any addition order computes the exact sum modulo ``2^bits``, one
    changed or added element moves that residue by at most its idealized
    amount, and no two residues are further than half the modulus apart —
    so the wrap distance is bounded by ``min(floor(m/2), idealized)``.
    The bound is about residues: the noise must live on the same circle.
    """
    if not isinstance(spec.fmt, IntFormat):
        raise UnsupportedCombination("modular sensitivity needs an integer format")
    if spec.fmt.overflow != "wraparound":
        raise UnsupportedCombination("modular sensitivity is a wraparound story")
    m = spec.fmt.modulus
    ideal = idealized_sensitivity(spec).value
    return SensitivityBound(value=min(Fraction(m // 2), ideal),
                            rule=f"modular-{spec.metric}",
                            output_metric="mod", details={"modulus": m})


# ---------------------------------------------------------------------------
# Accuracy bounds for float summation
# ---------------------------------------------------------------------------

def accuracy_bound(algorithm: str, n: int, fmt: FloatFormat,
                   lower: Value, upper: Value) -> Fraction:
    """Worst-case ``|computed - exact|`` for ``n`` in-range normal floats.

    iterative: ``n^2 * t * max(|L|, U)``
    pairwise:  ``(c*t) / (1 - c*t) * n * max(|L|, U)``,
               ``c = ceil(log2 n)`` — needs ``c*t < 1/2``
    kahan:     ``(2t + C*n*t^2) * n * max(|L|, U)``

    with ``t = 2^-(k+1)`` the unit roundoff of a ``k``-bit mantissa.
    """
    return _accuracy_from_fractions(algorithm, n, fmt, _fr(lower), _fr(upper))


def _accuracy_from_fractions(algorithm: str, n: int, fmt: FloatFormat,
                             lo: Fraction, hi: Fraction) -> Fraction:
    if n < 0:
        raise PreconditionFailed("n must be nonnegative")
    max_mag = max(abs(lo), abs(hi))
    t = Fraction(1, 2 ** (fmt.mantissa_bits + 1))
    if algorithm == "iterative":
        return n * n * t * max_mag
    if algorithm == "pairwise":
        if n <= 1:
            return Fraction(0)
        c = (n - 1).bit_length()  # ceil(log2 n) for n >= 2
        if c * t >= Fraction(1, 2):
            raise PreconditionFailed(
                "cascade accuracy bound needs ceil(log2 n) * 2^-(k+1) < 1/2")
        return (c * t) / (1 - c * t) * n * max_mag
    if algorithm == "kahan":
        return (2 * t + KAHAN_ACCURACY_CONSTANT * n * t * t) * n * max_mag
    raise UnsupportedCombination(f"no accuracy bound for {algorithm!r}")


# ---------------------------------------------------------------------------
# Implemented sensitivity dispatch
# ---------------------------------------------------------------------------

def _has(method: SumMethod, kind) -> bool:
    return any(isinstance(t, kind) for t in method.transforms)


def _get(method: SumMethod, kind):
    return next((t for t in method.transforms if isinstance(t, kind)), None)


def _only_transforms(method: SumMethod, *allowed) -> bool:
    return all(isinstance(t, allowed) for t in method.transforms)


def implemented_sensitivity_bound(spec: SensSpec) -> SensitivityBound:
    """Certified sensitivity upper bound for the actual implementation.

    Every supported (format, policy, algorithm, transforms, metric)
    combination maps to one named rule; see the module docstring for the
    failure taxonomy.
    """
    if isinstance(spec.fmt, IntFormat):
        return _int_bound(spec)
    return _float_bound(spec)


def _int_bound(spec: SensSpec) -> SensitivityBound:
    fmt: IntFormat = spec.fmt
    method = spec.method
    if method.algorithm == "kahan":
        raise UnsupportedCombination("compensated summation is float-only")

    if spec.checked:
        if spec.n is None:
            raise PreconditionFailed("the checked regime needs a known size")
        if not _only_transforms(method, RandomPermutation):
            raise UnsupportedCombination(
                "the checked regime covers plain (optionally shuffled) sums")
        if not check_multiplication(spec.lower, spec.upper, spec.n, fmt):
            raise PreconditionFailed(
                "n*U or n*L escapes the type range; the checked regime "
                "does not apply to these parameters")
        return SensitivityBound(value=idealized_sensitivity(spec).value,
                                rule="int-checked-idealized",
                                details={"n": spec.n})

    if fmt.overflow == "wraparound":
        # Without the product check, a wraparound sum is only safe in the
        # modular world: residue outputs, modular noise.  Truncation and
        # bound shifting change the function in ways the residue argument
        # does not cover; a permutation does not change the residue at all.
        if not _only_transforms(method, RandomPermutation):
            raise UnsupportedCombination(
                "modular bounds cover plain (optionally shuffled) sums")
        return modular_sensitivity_bound(spec)

    # Saturating overflow from here on.
    if method.algorithm == "split" and _only_transforms(method, RandomPermutation):
        # Each partial is a saturating fold of same-signed values, which is
        # order-independent, so the release is a function of the multiset:
        # every metric gets its idealized value.
        return SensitivityBound(value=idealized_sensitivity(spec).value,
                                rule="int-saturating-split")
    if method.algorithm == "iterative" and not method.transforms \
            and spec.metric in ("id", "ham"):
        return SensitivityBound(value=idealized_sensitivity(spec).value,
                                rule="int-saturating-ordered")
    if method.algorithm == "iterative" and spec.metric in UNORDERED_METRICS \
            and _has(method, RandomPermutation) \
            and _only_transforms(method, RandomPermutation):
        # Unordered adjacency couples into ordered adjacency once the
        # order is freshly randomized, so the ordered bound transfers.
        return SensitivityBound(value=idealized_sensitivity(spec).value,
                                rule="int-saturating-shuffled")
    raise UnsupportedCombination(
        f"no certified bound for saturating ints with "
        f"algorithm={method.algorithm!r}, metric={spec.metric!r}, "
        f"transforms={method.transforms!r}")


def _float_bound(spec: SensSpec) -> SensitivityBound:
    method = spec.method
    if spec.checked:
        raise UnsupportedCombination(
            "the checked-multiplication regime is an integer story; float "
            "overflow is excluded via the accuracy routes instead")
    if method.algorithm == "split":
        return _split_rtz_bound(spec)
    if method.rounding != "banker":
        raise UnsupportedCombination(
            "certified float bounds assume round-to-nearest element adds")
    if method.algorithm not in ("iterative", "pairwise", "kahan"):
        raise UnsupportedCombination(f"unknown algorithm {method.algorithm!r}")
    if spec.metric in KNOWN_N_METRICS:
        return _float_accuracy_bound(spec)
    return _float_truncated_bound(spec)


def _effective_float_bounds(spec: SensSpec) -> Tuple[Fraction, Fraction, str]:
    """Bounds seen by the summation core, after an exact bound shift."""
    lo, hi = _fr(spec.lower), _fr(spec.upper)
    if _has(spec.method, ShiftBounds):
        span = hi - lo
        if not is_representable(span, spec.fmt):
            raise PreconditionFailed(
                "U - L is not exactly representable, so the shifted sum "
                "would compute a different function")
        return Fraction(0), span, "+shift"
    return lo, hi, ""


def _float_bounds_as_simfloats(spec: SensSpec, lo: Fraction,
                               hi: Fraction) -> Tuple[SimFloat, SimFloat]:
    if not _has(spec.method, ShiftBounds):
        return spec.lower, spec.upper
    return (SimFloat.zero(spec.fmt),
            round_dyadic(Dyadic.from_fraction(hi), spec.fmt, "toward_zero"))


def _float_accuracy_bound(spec: SensSpec) -> SensitivityBound:
    """``co``/``ham`` for iterative, cascade, or compensated float sums.

    Replace-one adjacency leaves the exact sum within ``U - L``; the
    accuracy theorem bounds each computed sum's distance to its exact sum
    in any element order; the triangle inequality does the rest —
    provided no intermediate result can saturate to infinity, which the
    directed-rounding overflow certificate establishes first.
    """
    method = spec.method
    if not _only_transforms(method, RandomPermutation, ShiftBounds):
        raise UnsupportedCombination(
            "the replace-one accuracy route covers plain, shuffled, or "
            "shifted sums; truncation changes which elements are summed")
    if spec.n is None:
        raise PreconditionFailed("co/ham accuracy bounds need a known size")
    lo, hi, suffix = _effective_float_bounds(spec)
    acc = _accuracy_from_fractions(method.algorithm, spec.n, spec.fmt, lo, hi)
    lo_f, hi_f = _float_bounds_as_simfloats(spec, lo, hi)
    if not float_overflow_check(lo_f, hi_f, spec.n, acc, spec.fmt):
        raise PreconditionFailed(
            "these parameters admit overflow to infinity; the accuracy "
            "route requires the overflow certificate to pass")
    return SensitivityBound(
        value=(hi - lo) + 2 * acc,
        rule=f"float-{method.algorithm}-accuracy{suffix}",
        details={"accuracy": acc, "n": spec.n})


def _float_truncated_bound(spec: SensSpec) -> SensitivityBound:
    """``sym``/``id`` for plain float algorithms, via a truncation cap.

    Without a size cap the accumulated rounding error is unbounded, so
    these metrics require a ``Truncate(n_max)`` transform.  Inserting one
    element before the cap evicts at most one other, so the exact sums of
    the truncated prefixes differ by at most ``max(|L|, U, U - L)``; the
    accuracy theorem at ``n_max`` covers the rest.  ``sym`` adjacency
    says nothing about positions, so it additionally needs a random
    permutation ahead of the truncation (the shuffle couples unordered
    adjacency into insert/delete adjacency).
    """
    method = spec.method
    trunc = _get(method, Truncate)
    if trunc is None:
        raise UnsupportedCombination(
            "sym/id bounds for iterative/pairwise/kahan float sums need a "
            "truncation transform (or use the split algorithm)")
    if not _only_transforms(method, RandomPermutation, ShiftBounds, Truncate):
        raise UnsupportedCombination("unrecognized transform combination")
    if spec.metric == "sym":
        idx_rp = next((i for i, t in enumerate(method.transforms)
                       if isinstance(t, RandomPermutation)), None)
        idx_tr = next(i for i, t in enumerate(method.transforms)
                      if isinstance(t, Truncate))
        if idx_rp is None or idx_rp > idx_tr:
            raise PreconditionFailed(
                "the sym bound for truncated summation needs a random "
                "permutation applied before the truncation")
    n_max = trunc.n_max
    lo, hi, suffix = _effective_float_bounds(spec)
    acc = _accuracy_from_fractions(method.algorithm, n_max, spec.fmt, lo, hi)
    lo_f, hi_f = _float_bounds_as_simfloats(spec, lo, hi)
    if not float_overflow_check(lo_f, hi_f, n_max, acc, spec.fmt):
        raise PreconditionFailed(
            "these parameters admit overflow to infinity at the truncation "
            "cap; the accuracy route requires the overflow certificate")
    value = max(abs(lo), abs(hi), hi - lo) + 2 * acc
    return SensitivityBound(
        value=value, rule=f"float-{method.algorithm}-truncated{suffix}",
        details={"accuracy": acc, "n_max": n_max})


def _split_rtz_bound(spec: SensSpec) -> SensitivityBound:
    """Sign-partitioned summation with toward-zero partials.

    Toward-zero accumulation of same-signed values is monotone and can
    only lose ground to the exact partial, which caps how far one
    inserted or replaced element moves the release regardless of the
    dataset size.  The bounds depend only on the magnitudes of the bounds
    (plus ``n`` in the known-size form) and hold for elements in the
    normal range.

    Unknown size (``id``; ``sym`` after a shuffle), with
    ``b = floor(log2 mag)`` per nonzero side::

        max over sides of (2^b + mag)  +  max over sides of 2^b    <= 3*max

    Known size (``ham``; ``co`` after a shuffle), with
    ``c = floor(log2 mag)`` and ``b = min(c, floor(log2(n*mag)) - k)``::

        sum over sides of (2^b + mag)
          + max over sides of min(2^b, 2^(c+1))                    <= 5*max
    """
    fmt: FloatFormat = spec.fmt
    method = spec.method
    metric = spec.metric
    if not _only_transforms(method, RandomPermutation, ShiftBounds):
        raise UnsupportedCombination(
            "split bounds cover plain, shuffled, or shifted sums")
    if metric in UNORDERED_METRICS and not _has(method, RandomPermutation):
        raise PreconditionFailed(
            "unordered metrics for split summation need a random "
            "permutation: the bound is proven for the shuffled release")
    lo, hi, suffix = _effective_float_bounds(spec)
    k = fmt.mantissa_bits
    u_mag = max(hi, Fraction(0))
    l_mag = max(-lo, Fraction(0))
    mags = [m for m in (u_mag, l_mag) if m > 0]
    assumes = "elements in the normal range"

    if metric in ("sym", "id"):
        if not mags:
            return SensitivityBound(Fraction(0),
                                    rule=f"float-split-unknown-n{suffix}")
        side = max(_pow2(floor_log2_fraction(m)) + m for m in mags)
        value = side + max(_pow2(floor_log2_fraction(m)) for m in mags)
        return SensitivityBound(
            value=value, rule=f"float-split-unknown-n{suffix}",
            details={"coarse": 3 * max(mags), "assumes": assumes})

    if spec.n is None:
        raise PreconditionFailed("co/ham split bounds need a known size")
    if spec.n < 1:
        raise PreconditionFailed("co/ham need at least one element")
    if not mags:
        return SensitivityBound(Fraction(0),
                                rule=f"float-split-known-n{suffix}")
    total = Fraction(0)
    third = []
    for mag in mags:
        c = floor_log2_fraction(mag)
        b = min(c, floor_log2_fraction(spec.n * mag) - k)
        total += _pow2(b) + mag
        third.append(min(_pow2(b), _pow2(c + 1)))
    return SensitivityBound(
        value=total + max(third), rule=f"float-split-known-n{suffix}",
        details={"coarse": 5 * max(mags), "assumes": assumes, "n": spec.n})


# ---------------------------------------------------------------------------
# Brute force ground truth
# ---------------------------------------------------------------------------

@dataclass
class BruteForceResult:
    """Exact maximum release gap over adjacent dataset pairs."""

    value: Union[Fraction, int]
    witness: Optional[Tuple[Tuple[Value, ...], Tuple[Value, ...]]]
    datasets: int
    output_metric: str


class _GapTracker:
    """Running maximum of ``|a - b|`` (or wrap distance) with witnesses."""

    __slots__ = ("best", "pair", "modulus")

    def __init__(self, modulus: Optional[int] = None):
        self.best = None
        self.pair = None
        self.modulus = modulus

    def offer(self, sa, ta, sb, tb) -> None:
        gap = d_mod(sa, sb, self.modulus) if self.modulus else abs(sa - sb)
        if self.best is None or gap > self.best:
            self.best = gap
            self.pair = (ta, tb)


class _Extremes:
    """Per-group min/max release with witness tuples."""

    __slots__ = ("lo", "lo_t", "hi", "hi_t")

    def __init__(self, s, t):
        self.lo = self.hi = s
        self.lo_t = self.hi_t = t

    def add(self, s, t) -> None:
        if s < self.lo:
            self.lo, self.lo_t = s, t
        elif s > self.hi:
            self.hi, self.hi_t = s, t


def _domain(spec: SensSpec, include_subnormals: bool) -> List[Value]:
    if isinstance(spec.fmt, FloatFormat):
        return values_in_range(spec.fmt, spec.lower, spec.upper,
                               include_subnormals=include_subnormals)
    return [KInt(spec.fmt, v)
            for v in range(spec.lower.value, spec.upper.value + 1)]


def brute_force_sensitivity(spec: SensSpec, include_subnormals: bool = False,
                            work_guard: int = 10_000_000) -> BruteForceResult:
    """Exact sensitivity of a deterministic method by full enumeration.

    Every dataset over the representable values inside the bounds (normal
    floats plus zero unless ``include_subnormals``) is released exactly
    once; the maximization over adjacent pairs is organized around shared
    sub-multisets (``sym``/``co``), shared contexts (``ham``), or direct
    deletions (``id``), so the cost is proportional to datasets times
    length rather than to the number of pairs.  ``spec.n`` is the exact
    length for ``co``/``ham`` and the length cap (sizes ``0..n``) for
    ``sym``/``id``.

    Wraparound integer releases are compared in wrap distance, matching
    the modular bounds; everything else in absolute value, with an
    infinite release entering at its working value ``±2^(emax+1)`` — a
    method that can saturate shows gaps the size of the type range, which
    is the honest reading.
    """
    if spec.n is None:
        raise PreconditionFailed("brute force needs a size (or size cap)")
    if _has(spec.method, RandomPermutation):
        raise PreconditionFailed(
            "brute force maximizes over a deterministic release; strip the "
            "permutation (its couplings are checked separately)")
    domain = _domain(spec, include_subnormals)
    n = spec.n
    sizes = [n] if spec.metric in KNOWN_N_METRICS else list(range(n + 1))
    work = sum(max(s, 1) * len(domain) ** s for s in sizes)
    if work > work_guard:
        raise PreconditionFailed(
            f"estimated {work} release/grouping steps exceed the "
            f"brute-force work guard ({work_guard})")

    modulus = spec.fmt.modulus if (isinstance(spec.fmt, IntFormat) and
                                   spec.fmt.overflow == "wraparound") else None
    template = Dataset(spec.fmt, spec.lower, spec.upper, ())

    def release(tup):
        out = run_sum(template.replace_elements(tup), spec.method).value
        if isinstance(out, KInt):
            return out.value % modulus if modulus else out.value
        if isinstance(out, int):         # exact integer sum
            return out % modulus if modulus else out
        if isinstance(out, Dyadic):      # exact float sum
            return out.to_fraction()
        return out.to_dyadic().to_fraction()

    tracker = _GapTracker(modulus)
    if spec.metric == "ham":
        count = _scan_ham(domain, n, release, tracker, modulus)
    elif spec.metric == "co":
        count = _scan_co(domain, n, release, tracker, modulus)
    elif spec.metric == "id":
        count = _scan_id(domain, sizes, release, tracker)
    else:
        count = _scan_sym(domain, sizes, release, tracker, modulus)
    value = tracker.best if tracker.best is not None else 0
    return BruteForceResult(value=value, witness=tracker.pair,
                            datasets=count,
                            output_metric="mod" if modulus else "abs")


def _group_offer(groups, key, s, t, tracker, modulus):
    """Feed one (release, tuple) into a group and race it against the rest.

    Absolute gaps within a group are maximized by the extremes, so only
    min/max are kept.  Wrap distance has no such monotonicity; modular
    groups keep one witness per residue instead (there are at most ``m``).
    """
    if modulus:
        seen = groups.get(key)
        if seen is None:
            groups[key] = {s: t}
        elif s not in seen:
            for sb, tb in seen.items():
                tracker.offer(s, t, sb, tb)
            seen[s] = t
    else:
        ext = groups.get(key)
        if ext is None:
            groups[key] = _Extremes(s, t)
        else:
            ext.add(s, t)
            tracker.offer(ext.lo, ext.lo_t, ext.hi, ext.hi_t)


def _scan_ham(domain, n, release, tracker, modulus) -> int:
    """Pairs differing in at most one position: group by the other n-1."""
    count = 0
    groups: Dict[tuple, object] = {}
    for tup in itertools.product(domain, repeat=n):
        count += 1
        s = release(tup)
        for p in range(n):
            _group_offer(groups, (p, tup[:p], tup[p + 1:]), s, tup,
                         tracker, modulus)
    return count


def _scan_co(domain, n, release, tracker, modulus) -> int:
    """Pairs whose multisets differ by one replacement: group by the
    sorted remove-one multiset (this puts all orderings of both sides of
    every adjacent pair into one group)."""
    count = 0
    groups: Dict[tuple, object] = {}
    for tup in itertools.product(domain, repeat=n):
        count += 1
        s = release(tup)
        seen_keys = set()
        for p in range(n):
            key = tuple(sorted(tup[:p] + tup[p + 1:], key=_value_cmp_key))
            if key in seen_keys:
                continue
            seen_keys.add(key)
            _group_offer(groups, key, s, tup, tracker, modulus)
    return count


def _scan_id(domain, sizes, release, tracker) -> int:
    """Pairs at insert/delete distance one: direct deletion probes."""
    count = 0
    prev: Dict[tuple, object] = {}
    for size in sizes:
        curr: Dict[tuple, object] = {}
        for tup in itertools.product(domain, repeat=size):
            count += 1
            s = release(tup)
            curr[tup] = s
            for p in range(size):
                sub = tup[:p] + tup[p + 1:]
                if sub in prev:
                    tracker.offer(s, tup, prev[sub], sub)
        prev = curr
    return count


def _scan_sym(domain, sizes, release, tracker, modulus) -> int:
    """Pairs whose multisets differ by one element (or not at all).

    Equal multisets in different orders are distance zero, so each size's
    tuples are grouped by their own sorted form; add/remove pairs probe
    the previous size's groups through each deletion.
    """
    count = 0
    prev: Dict[tuple, object] = {}
    for size in sizes:
        curr: Dict[tuple, object] = {}
        for tup in itertools.product(domain, repeat=size):
            count += 1
            s = release(tup)
            _group_offer(curr, tuple(sorted(tup, key=_value_cmp_key)),
                         s, tup, tracker, modulus)
            seen_keys = set()
            for p in range(size):
                key = tuple(sorted(tup[:p] + tup[p + 1:], key=_value_cmp_key))
                if key in seen_keys:
                    continue
                seen_keys.add(key)
                hit = prev.get(key)
                if hit is None:
                    continue
                if modulus:
                    for sb, tb in hit.items():
                        tracker.offer(s, tup, sb, tb)
                else:
                    tracker.offer(s, tup, hit.lo, hit.lo_t)
                    tracker.offer(s, tup, hit.hi, hit.hi_t)
        prev = curr
    return count


# ---------------------------------------------------------------------------
# Couplings: unordered adjacency -> ordered adjacency under a shuffle
# ---------------------------------------------------------------------------

def _check_same_frame(u: Dataset, v: Dataset) -> None:
    if u.fmt != v.fmt or u.lower != v.lower or u.upper != v.upper:
        raise ValueError("coupled datasets must share format and bounds")


def couple_sym(u: Dataset, v: Dataset, seed: int) -> Tuple[Dataset, Dataset]:
    """Couple the shuffles of two add/remove-adjacent datasets.

    Returns ``(u', v')`` where ``u'`` is a uniform shuffle of ``u``,
    ``v'`` is a uniform shuffle of ``v``, and the two differ by one
    insertion or deletion: the shorter side is shuffled, and the leftover
    element is inserted at a uniform position.  Hence ``d_id(u', v') <=
    1`` always — unordered adjacency became ordered adjacency, so any
    ordered-metric bound applies to the shuffled release.
    """
    _check_same_frame(u, v)
    hu, hv = Counter(u.iter_values()), Counter(v.iter_values())
    extra_u = hu - hv
    extra_v = hv - hu
    d = sum(extra_u.values()) + sum(extra_v.values())
    if d > 1:
        raise PreconditionFailed(f"datasets are not sym-adjacent (distance {d})")
    rng = random.Random(seed)
    if d == 0:
        order = _shuffle(u.to_list(), rng)
        return u.replace_elements(order), v.replace_elements(order)
    extra = next(iter(extra_u or extra_v))
    shorter = v if extra_u else u
    base = _shuffle(shorter.to_list(), rng)
    inserted = list(base)
    inserted.insert(rng.randrange(len(base) + 1), extra)
    if extra_u:
        return u.replace_elements(inserted), v.replace_elements(base)
    return u.replace_elements(base), v.replace_elements(inserted)


def couple_co(u: Dataset, v: Dataset, seed: int) -> Tuple[Dataset, Dataset]:
    """Couple the shuffles of two replace-one-adjacent datasets.

    Aligns the shared multiset position by position, parks the differing
    elements in the same slot, and applies one shared shuffle to both
    sides.  Each output is a uniform shuffle of its input and they differ
    in at most one position: ``d_ham(u', v') <= 1``.
    """
    _check_same_frame(u, v)
    if len(u) != len(v):
        raise PreconditionFailed("co-adjacent datasets must share a length")
    hu, hv = Counter(u.iter_values()), Counter(v.iter_values())
    extra_u = hu - hv
    extra_v = hv - hu
    if sum(extra_u.values()) > 1:
        raise PreconditionFailed("datasets are not co-adjacent")
    common = sorted((hu & hv).elements(), key=_value_cmp_key)
    a, b = list(common), list(common)
    if extra_u:
        a.append(next(iter(extra_u)))
        b.append(next(iter(extra_v)))
    rng = random.Random(seed)
    perm = _shuffle(list(range(len(a))), rng)
    return (u.replace_elements(a[i] for i in perm),
            v.replace_elements(b[i] for i in perm))


def _shuffle(items: list, rng: random.Random) -> list:
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]
    return items


# ---------------------------------------------------------------------------
# Guidance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Recommendation:
    method: SumMethod
    bound: SensitivityBound
    notes: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"method": self.method.to_json(),
                "bound": self.bound.to_json(),
                "notes": list(self.notes)}


_FRESH_SEED_NOTE = ("replace the placeholder permutation seed with a fresh "
                    "secret draw for every release")


def recommend(fmt: ElementFormat, lower: Value, upper: Value, metric: str,
              n: Optional[int] = None,
              n_max: Optional[int] = None) -> List[Recommendation]:
    """Rank the certifiable ways to sum under these parameters.

    Returns every method this library can put a certified bound on, in
    preference order; each entry carries the bound it would ship with and
    any operational caveats (modular noise, fresh permutation seeds,
    truncation caps).  An empty list means nothing here is certifiable —
    which is itself the advice.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    out: List[Recommendation] = []
    if isinstance(fmt, IntFormat):
        _recommend_int(fmt, lower, upper, metric, n, out)
    else:
        _recommend_float(fmt, lower, upper, metric, n, n_max, out)
    return out


def _try(out: List[Recommendation], spec: SensSpec, *notes: str) -> None:
    try:
        bound = implemented_sensitivity_bound(spec)
    except (PreconditionFailed, UnsupportedCombination):
        return
    if bound.output_metric == "mod":
        notes += ("noise must be folded onto the same residue circle and "
                  "the release read as a residue",)
    out.append(Recommendation(spec.method, bound, notes))


def _recommend_int(fmt, lower, upper, metric, n, out):
    if n is not None:
        _try(out, SensSpec(fmt, lower, upper, metric, SumMethod(), n=n,
                           checked=True),
             "verify the dataset size before every release; overflow is "
             "then impossible and the idealized bound is exact")
    if fmt.overflow == "wraparound":
        _try(out, SensSpec(fmt, lower, upper, metric, SumMethod(), n=n))
        return
    _try(out, SensSpec(fmt, lower, upper, metric, SumMethod("split"), n=n))
    if metric in UNORDERED_METRICS:
        _try(out, SensSpec(fmt, lower, upper, metric,
                           SumMethod(transforms=(RandomPermutation(0),)), n=n),
             _FRESH_SEED_NOTE)
    else:
        _try(out, SensSpec(fmt, lower, upper, metric, SumMethod(), n=n))


def _recommend_float(fmt, lower, upper, metric, n, n_max, out):
    span_ok = is_representable(_fr(upper) - _fr(lower), fmt)
    if metric in KNOWN_N_METRICS:
        if n is not None:
            ranked: List[Recommendation] = []
            for alg in ("kahan", "pairwise", "iterative"):
                _try(ranked, SensSpec(fmt, lower, upper, metric,
                                      SumMethod(alg), n=n))
                if span_ok:
                    _try(ranked,
                         SensSpec(fmt, lower, upper, metric,
                                  SumMethod(alg, transforms=(ShiftBounds(),)),
                                  n=n),
                         "elements are shifted by -L before summing; add "
                         "L*n back onto the noisy release")
            ranked.sort(key=lambda r: r.bound.value)
            out.extend(ranked)
        split_tr = () if metric == "ham" else (RandomPermutation(0),)
        _try(out, SensSpec(fmt, lower, upper, metric,
                           SumMethod("split", transforms=split_tr), n=n),
             *((_FRESH_SEED_NOTE,) if split_tr else ()))
        return
    # sym / id: no fixed size to lean on
    if n_max is not None:
        transforms = (Truncate(n_max),) if metric == "id" else \
            (RandomPermutation(0), Truncate(n_max))
        for alg in ("kahan", "pairwise", "iterative"):
            _try(out, SensSpec(fmt, lower, upper, metric,
                               SumMethod(alg, transforms=transforms)),
                 f"datasets longer than {n_max} are cut off; pick the cap "
                 "above any plausible size",
                 *((_FRESH_SEED_NOTE,) if metric == "sym" else ()))
    split_tr = () if metric == "id" else (RandomPermutation(0),)
    _try(out, SensSpec(fmt, lower, upper, metric,
                       SumMethod("split", transforms=split_tr)),
         *((_FRESH_SEED_NOTE,) if split_tr else ()))
