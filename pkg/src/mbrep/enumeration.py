"""The truncated monoid of power-products <= N and related lookups."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property

from .errors import ResourceLimitError, ValidationError
from .numsys import BaseSystem, PowerProduct

DEFAULT_CAP = 10**7
FLOAT_PRUNE_BITS = 32


def floor_log(b: int, n: int) -> int:
    """Largest ``e`` with ``b**e <= n``, by exact integer arithmetic."""
    if n < 1:
        raise ValidationError(f"floor_log needs n >= 1, got {n}")
    if n < b:
        return 0
    if b == 2:
        return n.bit_length() - 1
    # binary decomposition of the exponent over b, b^2, b^4, ...
    powers = [b]
    while powers[-1] * powers[-1] <= n:
        powers.append(powers[-1] * powers[-1])
    e, acc = 0, 1
    for k in range(len(powers) - 1, -1, -1):
        t = acc * powers[k]
        if t <= n:
            acc = t
            e += 1 << k
    return e


def t_bound(system: BaseSystem, N: int) -> int:
    """``prod_j (1 + floor(log_{b_j} N))``, an upper bound on ``|B_N|``."""
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    out = 1
    for b in system.bases:
        out *= 1 + floor_log(b, N)
    return out


@dataclass(frozen=True)
class TruncatedMonoid:
    bound: int
    elements: tuple[PowerProduct, ...]
    t_bound: int

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def values(self) -> list[int]:
        return [pp.value for pp in self.elements]

    def largest_leq(self, n: int) -> PowerProduct:
        if not 1 <= n <= self.bound:
            raise ValidationError(f"{n} outside [1, {self.bound}]")
        return self.elements[bisect_right(self.values, n) - 1]


def enumerate_power_products(system: BaseSystem, N: int, cap: int = DEFAULT_CAP) -> TruncatedMonoid:
    """All power-products ``<= N``, ascending and deduplicated by value.

    When bases are dependent, the lexicographically smallest exponent vector
    is kept for each value.
    """
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    bases = system.bases
    r = len(bases)
    found: dict[int, tuple[int, ...]] = {}
    exps = [0] * r

    def walk(j: int, value: int) -> None:
        if j == r:
            if value not in found:
                if len(found) >= cap:
                    raise ResourceLimitError(f"|B_N| exceeds the cap of {cap}")
                found[value] = tuple(exps)
            return
        a = 0
        while value <= N:
            exps[j] = a
            walk(j + 1, value)
            value *= bases[j]
            a += 1
        exps[j] = 0

    walk(0, 1)
    elements = tuple(PowerProduct(v, found[v]) for v in sorted(found))
    return TruncatedMonoid(N, elements, t_bound(system, N))


def _closed_form_base(bases: tuple[int, ...]) -> int:
    # the smallest base has the most exponents, so it is solved directly
    return min(range(len(bases)), key=lambda j: bases[j])


def largest_leq(system: BaseSystem, n: int, monoid: TruncatedMonoid | None = None) -> PowerProduct:
    """The maximal power-product ``B <= n``.

    Uses ``monoid`` for an O(log) lookup when it covers ``n``. Otherwise one
    base is solved in closed form, ``floor_log(b, n // partial)``, while the
    exponents of the others are searched; above 32 bits the search is
    narrowed by float logarithms first, and the survivors are compared
    exactly.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if monoid is not None and n <= monoid.bound:
        return monoid.largest_leq(n)
    if n.bit_length() > FLOAT_PRUNE_BITS:
        return _largest_leq_pruned(system.bases, n)
    return _largest_leq_exact(system.bases, n)


def _largest_leq_exact(bases: tuple[int, ...], n: int) -> PowerProduct:
    last = _closed_form_base(bases)
    others = [j for j in range(len(bases)) if j != last]
    b_last = bases[last]
    best_value = 0
    best_exps: list[int] = []
    exps = [0] * len(bases)

    def walk(k: int, partial: int) -> bool:
        nonlocal best_value, best_exps
        if k == len(others):
            e = floor_log(b_last, n // partial)
            value = partial * b_last**e
            if value > best_value:
                exps[last] = e
                best_value, best_exps = value, exps.copy()
            return value == n
        j = others[k]
        a = 0
        while partial <= n:
            exps[j] = a
            if walk(k + 1, partial):
                return True
            partial *= bases[j]
            a += 1
        exps[j] = 0
        return False

    walk(0, 1)
    return PowerProduct(best_value, tuple(best_exps))


def _largest_leq_pruned(bases: tuple[int, ...], n: int) -> PowerProduct:
    last = _closed_form_base(bases)
    others = [j for j in range(len(bases)) if j != last]
    logs = [math.log2(b) for b in bases]
    L = math.log2(n)
    # float error in L - S is a few ulps of L; the margin covers it many times over
    margin = 2.0**-30 * max(1.0, L / 64)

    # exponent vectors of the non-closed bases with sum(a_j log b_j) <= L
    combos: list[tuple[tuple[int, ...], float]] = [((), 0.0)]
    for j in others:
        grown = []
        for exps, S in combos:
            a = 0
            while S + a * logs[j] <= L + margin:
                grown.append((exps + (a,), S + a * logs[j]))
                a += 1
        combos = grown
    step = logs[last]
    # deficit log2(n / B) left after the closed-form base takes its share
    scored = []
    for exps, S in combos:
        d = (L - S) % step
        if d > step - margin:
            d -= step
        scored.append((d, exps))
    scored.sort(key=lambda t: t[0])

    # exact check in order of float deficit, until no remaining candidate can win
    best_value = 0
    best_exps: tuple[int, ...] = ()
    for d, exps in scored:
        if best_value and d > L - math.log2(best_value) + 2 * margin:
            break
        partial = 1
        for j, a in zip(others, exps):
            partial *= bases[j] ** a
        if partial > n:
            continue
        e = floor_log(bases[last], n // partial)
        value = partial * bases[last] ** e
        if value > best_value:
            full = [0] * len(bases)
            for j, a in zip(others, exps):
                full[j] = a
            full[last] = e
            best_value, best_exps = value, tuple(full)
    return PowerProduct(best_value, best_exps)
