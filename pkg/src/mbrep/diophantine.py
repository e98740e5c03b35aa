"""Diophantine machinery behind the nearest-power-product-below bound.

For two multiplicatively independent bases ``p`` and ``q`` the ratio
``lam = log_p q`` is irrational. The points ``frac(lam * m)``, ``m < M``,
cut the circle into gaps of at most three lengths, and the largest gap
controls how close some ``p**l * q**m`` gets to ``n`` from below.

Reals are carried as dyadic rationals. ``lam`` is rounded to a grid of
``2**-mantissa_bits`` and fractional parts are computed as exact integers
modulo ``2**mantissa_bits``; every gap statistic is therefore exact for the
rounded ``lam``, and the three-distance theorem holds for it exactly.
"""

from __future__ import annotations

import math
import random
import statistics
from bisect import bisect_right, insort
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath

from .enumeration import enumerate_power_products, floor_log
from .errors import PrecisionError, ValidationError
from .numsys import BaseSystem, PowerProduct, is_mult_independent_set

KAPPA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 11))


@dataclass(frozen=True)
class PrecisionPolicy:
    mantissa_bits: int = 256
    cluster_tolerance: float = 1e-12

    @property
    def error_bound(self) -> Fraction:
        """Certified absolute error of any value from :func:`log_ratio`."""
        return Fraction(1, 2 ** (self.mantissa_bits - 4))

    def context(self, magnitude_bits: int = 0) -> mpmath.MPContext:
        ctx = mpmath.MPContext()
        ctx.prec = self.mantissa_bits + magnitude_bits + 64
        return ctx

    def check(self, M: int) -> None:
        if self.mantissa_bits < 2 * math.log2(max(M, 1)) + 64:
            raise PrecisionError(f"{self.mantissa_bits} bits cannot resolve M = {M} points")


DEFAULT_POLICY = PrecisionPolicy()


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    man, exp = x.man_exp
    man = int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def _fixed(x, bits: int) -> int:
    """``floor(x * 2**bits)`` for a dyadic or rational ``x``."""
    f = _to_fraction(x)
    return (f.numerator << bits) // f.denominator


def _log_fixed(p: int, n: int, policy: PrecisionPolicy) -> int:
    """``log_p n`` as an integer multiple of ``2**-mantissa_bits``."""
    ctx = policy.context(max(n.bit_length(), 1).bit_length())
    bits = policy.mantissa_bits
    return int(ctx.floor(ctx.log(n) / ctx.log(p) * ctx.mpf(2) ** bits))


def log_ratio(p: int, q: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpmath.mpf:
    """``log_p q`` rounded to the nearest multiple of ``2**-mantissa_bits``."""
    if p <= 1 or q <= 1:
        raise ValidationError(f"bases must exceed 1, got {p}, {q}")
    if p == q or not is_mult_independent_set([p, q]):
        raise ValidationError(f"{p} and {q} are multiplicatively dependent")
    bits = policy.mantissa_bits
    ctx = policy.context(q.bit_length())
    scaled = int(ctx.nint(ctx.log(q) / ctx.log(p) * ctx.mpf(2) ** bits))
    return ctx.mpf(scaled) / ctx.mpf(2) ** bits


def convergents(lam, count: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> list[Fraction]:
    """The first ``count`` continued-fraction convergents of ``lam``.

    Each partial quotient is taken only when it is the same for both ends of
    the interval ``lam +- error_bound``; otherwise ``PrecisionError``.
    """
    centre = _to_fraction(lam)
    eps = policy.error_bound
    lo, hi = centre - eps, centre + eps
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    out = []
    for _ in range(count):
        a = math.floor(lo)
        if math.floor(hi) != a or lo == a:
            raise PrecisionError(f"partial quotient {len(out)} not certified at {policy.mantissa_bits} bits")
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
        out.append(Fraction(h, k))
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return out


def _cluster(lengths: Sequence[int], tol: float) -> list[int]:
    """Group sorted lengths whose relative spread is within ``tol``."""
    groups: list[int] = []
    for v in sorted(lengths):
        if groups and v - groups[-1] <= tol * v:
            continue
        groups.append(v)
    return groups


def _three_gap_ok(groups: Sequence[int], tol: float) -> bool:
    if len(groups) > 3:
        return False
    if len(groups) == 3:
        small, mid, big = groups
        return abs(big - (mid + small)) <= tol * big
    return True


@dataclass(frozen=True)
class FractionalPartSequence:
    """Sorted points ``frac(lam * m)``, ``m < M``, in units of ``2**-scale_bits``."""

    lam: Fraction
    M: int
    scale_bits: int
    points: tuple[int, ...]
    gaps: tuple[int, ...]
    distinct_gaps: tuple[int, ...]
    tolerance: float

    @property
    def unit(self) -> int:
        return 1 << self.scale_bits

    @property
    def max_gap(self) -> float:
        return max(self.gaps) / self.unit

    @property
    def max_gap_exact(self) -> Fraction:
        return Fraction(max(self.gaps), self.unit)

    def gap_lengths(self) -> list[float]:
        return [g / self.unit for g in self.distinct_gaps]

    def sorted_points(self) -> list[float]:
        return [x / self.unit for x in self.points]

    @property
    def three_gap_ok(self) -> bool:
        return _three_gap_ok(self.distinct_gaps, self.tolerance)

    def discrepancy(self) -> Fraction:
        """Extreme discrepancy over all subintervals of [0, 1).

        Uses ``1/M + max(i/M - x_i) - min(i/M - x_i)`` over the sorted
        points; exact, so only offered for ``M <= 1000``.
        """
        if self.M > 1000:
            raise ValidationError("exact discrepancy is limited to M <= 1000")
        M = self.M
        diffs = [Fraction(i, M) - Fraction(x, self.unit) for i, x in enumerate(self.points, 1)]
        return Fraction(1, M) + max(diffs) - min(diffs)


def gap_stats(lam, M: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> FractionalPartSequence:
    """Circular gap structure of ``frac(lam * m)`` for ``0 <= m < M``."""
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    policy.check(M)
    bits = policy.mantissa_bits
    unit = 1 << bits
    step = _fixed(lam, bits) % unit
    pts = sorted((step * m) % unit for m in range(M))
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(unit - pts[-1] + pts[0])
    groups = _cluster(set(gaps), policy.cluster_tolerance)
    return FractionalPartSequence(
        _to_fraction(lam), M, bits, tuple(pts), tuple(gaps), tuple(groups), policy.cluster_tolerance
    )


def three_gap_sweep(lam, M_max: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> Iterator[tuple[int, list[int], bool]]:
    """Yield ``(M, clustered gap lengths, three-gap check)`` for ``M = 1..M_max``.

    Points are inserted one at a time; each insertion splits exactly one gap.
    """
    policy.check(M_max)
    bits = policy.mantissa_bits
    unit = 1 << bits
    step = _fixed(lam, bits) % unit
    pts = [0]
    counts = Counter({unit: 1})
    tol = policy.cluster_tolerance
    for M in range(1, M_max + 1):
        if M > 1:
            x = (step * (M - 1)) % unit
            i = bisect_right(pts, x)
            left = pts[i - 1] if i > 0 else pts[-1] - unit
            right = pts[i] if i < len(pts) else pts[0] + unit
            whole = right - left
            counts[whole] -= 1
            if not counts[whole]:
                del counts[whole]
            counts[x - left] += 1
            counts[right - x] += 1
            insort(pts, x)
        groups = _cluster(counts, tol)
        yield M, groups, _three_gap_ok(groups, tol)


def ceil_log(b: int, n: int) -> int:
    """Smallest ``M`` with ``b**M >= n``."""
    e = floor_log(b, n)
    return e if b**e == n else e + 1


def nearest_below_via_lattice(p: int, q: int, n: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> PowerProduct:
    """``p**l * q**m <= n`` built from the fractional-part gaps.

    With ``M = ceil(log_q n)``, pick the ``m < M`` whose point
    ``frac(lam * m)`` lies closest below ``frac(log_p n)``, then the largest
    ``l`` with ``p**l * q**m <= n`` (exact). The result satisfies
    ``log(n / B) <= max_gap * ln p`` for the gaps of the first ``M`` points.
    Exponents are returned in the order ``(p, q)``.
    """
    if n <= 1:
        raise ValidationError(f"n must exceed 1, got {n}")
    lam = log_ratio(p, q, policy)
    M = ceil_log(q, n)
    policy.check(M)
    if p ** floor_log(p, n) == n:
        m = 0
    else:
        bits = policy.mantissa_bits
        unit = 1 << bits
        target = _log_fixed(p, n, policy) % unit
        step = _fixed(lam, bits) % unit
        m, best = 0, 0
        for j in range(1, M):
            pt = (step * j) % unit
            if best < pt <= target:
                m, best = j, pt
    qm = q**m
    ell = floor_log(p, n // qm)
    return PowerProduct(p**ell * qm, (ell, m))


@dataclass
class LemmaFit:
    """Fitted constants for ``log(n / B(n)) <= C * (log n) ** -kappa``."""

    C: float | None
    kappa: float | None
    fit_range: tuple[int, int]
    validation_range: tuple[int, int]
    max_violation: float | None
    samples: int
    seed: int
    candidates: list[dict] = field(default_factory=list)
    worst_validation: list[tuple[int, float]] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.kappa is not None

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "C": self.C,
            "kappa": self.kappa,
            "fit_range": list(self.fit_range),
            "validation_range": list(self.validation_range),
            "max_violation": self.max_violation,
            "samples": self.samples,
            "seed": self.seed,
            "candidates": self.candidates,
            "worst_validation": [list(t) for t in self.worst_validation],
        }


def deficiency(n: int, B: int) -> float:
    """``log(n / B)``, exactly 0 when ``B == n``."""
    return 0.0 if B == n else math.log(n) - math.log(B)


def fit_lemma_constants(
    p: int,
    q: int,
    fit_range: tuple[int, int],
    validation_range: tuple[int, int],
    kappas: Sequence[float] = KAPPA_GRID,
    samples: int = 10_000,
    seed: int = 0,
) -> LemmaFit:
    """Fit ``C(kappa) = max delta(n) (log n)^kappa`` and validate out of sample.

    Both ranges are inclusive. The validation range is subsampled to
    ``samples`` points with ``random.Random(seed)``. The largest ``kappa``
    with no validation violation is accepted; if there is none the fit comes
    back with ``kappa = None`` and the candidate table filled in.
    """
    a, b = fit_range
    c, d = validation_range
    if not (2 <= a <= b < c <= d):
        raise ValidationError(f"need 2 <= fit_lo <= fit_hi < val_lo <= val_hi, got {fit_range}, {validation_range}")
    system = BaseSystem((p, q))
    values = enumerate_power_products(system, d).values

    def delta(n: int) -> float:
        return deficiency(n, values[bisect_right(values, n) - 1])

    fit_pts = [(math.log(n), delta(n)) for n in range(a, b + 1)]
    population = range(c, d + 1)
    chosen = population if len(population) <= samples else random.Random(seed).sample(population, samples)
    val = sorted((n, math.log(n), delta(n)) for n in chosen)

    candidates = []
    accepted = None
    for kappa in kappas:
        C = max(dl * ln**kappa for ln, dl in fit_pts)
        excess = [dl - C * ln**-kappa for _, ln, dl in val]
        violations = sum(1 for e in excess if e > 0)
        row = {"kappa": kappa, "C": C, "violations": violations, "max_violation": max(excess)}
        candidates.append(row)
        if violations == 0 and (accepted is None or kappa > accepted["kappa"]):
            accepted = row
    worst = sorted(((n, dl) for n, _, dl in val), key=lambda t: -t[1])[:10]
    return LemmaFit(
        C=accepted["C"] if accepted else None,
        kappa=accepted["kappa"] if accepted else None,
        fit_range=(a, b),
        validation_range=(c, d),
        max_violation=accepted["max_violation"] if accepted else None,
        samples=len(val),
        seed=seed,
        candidates=candidates,
        worst_validation=worst,
    )


@dataclass(frozen=True)
class GapDecay:
    rows: list[tuple[int, float]]
    slope: float | None


def gap_decay_table(p: int, q: int, M_list: Sequence[int], policy: PrecisionPolicy = DEFAULT_POLICY) -> GapDecay:
    """Max gap per ``M`` and the log-log regression slope (an empirical ``-kappa``)."""
    if list(M_list) != sorted(M_list):
        raise ValidationError("M_list must be ascending")
    lam = log_ratio(p, q, policy)
    rows = [(M, gap_stats(lam, M, policy).max_gap) for M in M_list]
    slope = None
    if len(rows) >= 2:
        xs = [math.log(M) for M, _ in rows]
        ys = [math.log(g) for _, g in rows]
        slope = statistics.linear_regression(xs, ys).slope
    return GapDecay(rows, slope)
