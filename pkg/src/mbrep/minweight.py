"""Exact minimal Hamming weight, weight records and the counting bound.

Two different quantities appear here and must not be confused:

* the *exact* minimal weight, where every power-product occurs at most once
  with a single digit from ``D``;
* the *reuse relaxation* computed by :func:`reuse_lower_bound_table`, where a
  power-product may be used repeatedly. It is only a lower bound.

Sweeps over ``1..N`` use Python integers as bitsets; the per-``n`` solver is
an iterative-deepening depth-first search.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from .enumeration import TruncatedMonoid, enumerate_power_products, t_bound
from .errors import (
    BudgetExceededError,
    DigitOverflowError,
    ResourceLimitError,
    UnrepresentableError,
    ValidationError,
)
from .numsys import BaseSystem, Representation

UNREACHABLE = -1
BITSET_CAP = 2**26
COMBINATION_CAP = 5 * 10**6


def _bits_to_array(bits: int, size: int) -> np.ndarray:
    raw = bits.to_bytes((size + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size].astype(bool)


def _check_cap(N: int) -> None:
    if N > BITSET_CAP:
        raise ResourceLimitError(f"bitset sweep up to {N} exceeds the cap of {BITSET_CAP}")


def _moves(system: BaseSystem, monoid: TruncatedMonoid) -> list[int]:
    N = monoid.bound
    return sorted({d * B for B in monoid.values for d in system.nonzero_digits if d * B <= N})


def reuse_lower_bound_table(system: BaseSystem, N: int) -> list[int]:
    """``lb[m]`` = fewest terms ``d*B`` summing to ``m`` when repeats are allowed.

    ``lb[0] = 0`` and unreachable entries are ``UNREACHABLE``. Since dropping
    the distinctness constraint can only help, ``lb[m]`` never exceeds the
    true minimal weight.
    """
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    _check_cap(N)
    monoid = enumerate_power_products(system, N)
    moves = _moves(system, monoid)
    mask = (1 << (N + 1)) - 1
    lb = np.full(N + 1, UNREACHABLE, dtype=np.int64)
    lb[0] = 0
    reached = 1
    level = 0
    while True:
        level += 1
        grown = reached
        for mv in moves:
            grown |= reached << mv
        grown &= mask
        fresh = grown & ~reached
        if not fresh:
            break
        lb[_bits_to_array(fresh, N + 1)] = level
        reached = grown
    return lb.tolist()


def unrepresentable_upto(system: BaseSystem, limit: int) -> list[int]:
    """All ``1 <= n <= limit`` with no representation (distinct power-products)."""
    if limit < 1:
        return []
    _check_cap(limit)
    monoid = enumerate_power_products(system, limit)
    mask = (1 << (limit + 1)) - 1
    reach = 1
    for B in monoid.values:
        step = reach
        for d in system.nonzero_digits:
            step |= reach << (d * B)
        reach = step & mask
    hit = _bits_to_array(reach, limit + 1)
    return [int(n) for n in np.flatnonzero(~hit[1:]) + 1]


@dataclass
class WeightProfile:
    limit: int
    weights: list[int]
    records: list[tuple[int, int]] = field(default_factory=list)

    def weight(self, n: int) -> int:
        return self.weights[n]

    def max_weight(self) -> int:
        return max(self.weights[1:], default=0)

    def unrepresentable(self) -> list[int]:
        return [n for n in range(1, self.limit + 1) if self.weights[n] == UNREACHABLE]

    def dyadic_maxima(self) -> list[tuple[int, int, int]]:
        """``(s, argmax n, max weight)`` over each range ``(2^(s-1), 2^s]``."""
        out = []
        s = 1
        while 1 << (s - 1) < self.limit:
            lo, hi = (1 << (s - 1)) + 1, min(1 << s, self.limit)
            best = max(range(lo, hi + 1), key=lambda n: self.weights[n])
            out.append((s, best, self.weights[best]))
            s += 1
        return out


def weight_profile(system: BaseSystem, N: int, start_layers: int = 8) -> WeightProfile:
    """Exact minimal weight of every ``1 <= n <= N``.

    Layer ``k`` of a 0/1 knapsack holds the sums of at most ``k`` distinct
    power-products with nonzero digits. The layer count doubles until every
    ``n`` is covered or it reaches ``|B_N|``, at which point anything
    uncovered is unrepresentable.
    """
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    _check_cap(N)
    monoid = enumerate_power_products(system, N)
    full = (1 << (N + 1)) - 1
    K = min(start_layers, len(monoid))
    while True:
        layers = [1] * (K + 1)
        for B in monoid.values:
            shifts = [d * B for d in system.nonzero_digits if d * B <= N]
            for k in range(K, 0, -1):
                below = layers[k - 1]
                acc = layers[k]
                for s in shifts:
                    acc |= below << s
                layers[k] = acc & full
        if layers[K] == full or K >= len(monoid):
            break
        K = min(2 * K, len(monoid))

    weights = np.full(N + 1, UNREACHABLE, dtype=np.int64)
    weights[0] = 0
    prev = 1
    for k in range(1, K + 1):
        fresh = layers[k] & ~prev
        if fresh:
            weights[_bits_to_array(fresh, N + 1)] = k
        prev = layers[k]
    wlist = weights.tolist()
    records = []
    best = 0
    for n in range(1, N + 1):
        if wlist[n] > best:
            best = wlist[n]
            records.append((n, best))
    return WeightProfile(N, wlist, records)


@dataclass(frozen=True)
class MinWeightResult:
    weight: int
    representation: Representation
    lower_bound: int


class MinWeightSolver:
    """Iterative-deepening search for a minimal-weight representation.

    Terms are chosen in strictly decreasing power-product order, so each
    ``B`` is used at most once. Pruning: ``d*B <= remaining``; the reuse
    lower bound of the remainder; and ``remaining <= max(D) * (sum of the
    power-products still available)``. Among minimal witnesses the
    lexicographically largest sequence of ``(B, d)`` is returned.

    The reuse table is built once for ``1..lb_limit`` and shared by all
    solves; remainders above it fall back to the trivial bound 1.
    """

    def __init__(self, system: BaseSystem, lb_limit: int = 10**4):
        self.system = system
        self.lb_limit = lb_limit
        self.monoid = enumerate_power_products(system, lb_limit)
        self.lb = reuse_lower_bound_table(system, lb_limit)
        self._digits_desc = tuple(reversed(system.nonzero_digits))

    def lower_bound(self, m: int) -> int:
        if m <= self.lb_limit:
            return self.lb[m]
        return 1

    def _candidates(self, n: int) -> TruncatedMonoid:
        if n <= self.lb_limit:
            return self.monoid
        return enumerate_power_products(self.system, n)

    def solve(self, n: int, weight_budget: int | None = None) -> MinWeightResult:
        if n < 1:
            raise ValidationError(f"n must be >= 1, got {n}")
        lb0 = self.lower_bound(n)
        if lb0 == UNREACHABLE:
            raise UnrepresentableError(f"{n} has no representation, even with reuse")
        monoid = self._candidates(n)
        asc = monoid.values[: bisect_right(monoid.values, n)]
        desc = asc[::-1]
        L = len(desc)
        suffix = [0] * (L + 1)
        for i in range(L - 1, -1, -1):
            suffix[i] = suffix[i + 1] + desc[i]

        exhaustive = L
        if weight_budget is None:
            from .greedy import greedy_encode

            try:
                weight_budget = greedy_encode(self.system, n, monoid).weight
            except DigitOverflowError:
                weight_budget = exhaustive
        if weight_budget < 1:
            raise ValidationError(f"weight budget must be >= 1, got {weight_budget}")

        maxd = self.system.max_digit
        digits = self._digits_desc
        lower = self.lower_bound

        def dfs(rem: int, start: int, depth: int, bound: int) -> list | None:
            if rem == 0:
                return []
            if depth >= bound:
                return None
            i0 = max(start, L - bisect_right(asc, rem))
            for i in range(i0, L):
                if rem > maxd * suffix[i]:
                    break
                B = desc[i]
                for d in digits:
                    nr = rem - d * B
                    if nr < 0:
                        continue
                    lbn = lower(nr)
                    if lbn == UNREACHABLE or depth + 1 + lbn > bound:
                        continue
                    tail = dfs(nr, i + 1, depth + 1, bound)
                    if tail is not None:
                        return [(i, d)] + tail
            return None

        bound = max(1, lb0)
        while bound <= min(weight_budget, exhaustive):
            found = dfs(n, 0, 0, bound)
            if found is not None:
                elements = monoid.elements
                # desc[i] is elements[L - 1 - i]
                terms = tuple((elements[L - 1 - i], d) for i, d in found)
                rep = Representation(self.system, terms)
                return MinWeightResult(len(terms), rep, lb0)
            bound += 1
        if weight_budget >= exhaustive:
            raise UnrepresentableError(f"{n} has no representation (search exhausted)")
        raise BudgetExceededError(f"{n} has no representation of weight <= {weight_budget}")


def minimal_weight_exact(
    system: BaseSystem,
    n: int,
    weight_budget: int | None = None,
    solver: MinWeightSolver | None = None,
) -> MinWeightResult:
    if solver is None:
        solver = MinWeightSolver(system, max(1, min(n, 10**4)))
    return solver.solve(n, weight_budget)


@dataclass(frozen=True)
class CountingCheck:
    N: int
    K: int
    t_bound: int
    monoid_size: int
    digit_count: int
    distinct_representable: int
    binom_bound: int
    crude_bound: int
    crude_bound_full: int

    @property
    def middle_applies(self) -> bool:
        return 2 * self.K <= self.t_bound

    @property
    def chain_holds(self) -> bool:
        ok = self.distinct_representable <= self.binom_bound
        if self.middle_applies:
            ok = ok and self.binom_bound <= self.crude_bound <= self.crude_bound_full
        return ok

    @property
    def dyadic_count(self) -> int:
        """Number of integers in ``(N/2, N]``."""
        return self.N - self.N // 2

    @property
    def forces_heavier(self) -> bool:
        """True when too few weight-``<= K`` values exist to cover ``(N/2, N]``."""
        return self.crude_bound < self.dyadic_count

    @property
    def weight_floor(self) -> float | None:
        """``log(count) / log((|D|-1) T)``; every ``K`` below it leaves part of ``(N/2, N]`` uncovered."""
        base = (self.digit_count - 1) * self.t_bound
        return math.log(self.dyadic_count) / math.log(base) if base > 1 else None

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "t_bound": self.t_bound,
            "monoid_size": self.monoid_size,
            "digit_count": self.digit_count,
            "distinct_representable": self.distinct_representable,
            "binom_bound": self.binom_bound,
            "crude_bound": self.crude_bound,
            "crude_bound_full": self.crude_bound_full,
            "middle_inequality_applies": self.middle_applies,
            "chain_holds": self.chain_holds,
            "dyadic_count": self.dyadic_count,
            "forces_weight_above_K": self.forces_heavier,
            "weight_floor": self.weight_floor,
        }


def counting_check(system: BaseSystem, N: int, K: int, cap: int = COMBINATION_CAP) -> CountingCheck:
    """Count values of weight ``<= K`` over ``B_N`` and evaluate both bounds."""
    if K < 0:
        raise ValidationError(f"K must be >= 0, got {K}")
    monoid = enumerate_power_products(system, N)
    T = t_bound(system, N)
    nz = system.nonzero_digits
    size = len(monoid)
    work = sum(math.comb(size, k) * len(nz) ** k for k in range(1, K + 1))
    if work > cap:
        raise ResourceLimitError(f"{work} weight-<={K} representations exceed the cap of {cap}")
    seen: set[int] = set()
    values = monoid.values
    for k in range(1, K + 1):
        for support in combinations(values, k):
            for ds in product(nz, repeat=k):
                seen.add(sum(d * B for d, B in zip(ds, support)))
    binom = sum(math.comb(T, k) * (len(system.digits) - 1) ** k for k in range(1, K + 1))
    # C(T,k) <= T^k/k!, so the sum stays below ((|D|-1) T)^K; the |D| form is looser still
    crude = (len(nz) * T) ** K
    crude_full = (len(system.digits) * T) ** K
    return CountingCheck(N, K, T, size, len(system.digits), len(seen), binom, crude, crude_full)
