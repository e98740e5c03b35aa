"""The natural greedy encoder, its table-spliced variant and step profiling."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Mapping

from .enumeration import TruncatedMonoid, enumerate_power_products, largest_leq
from .errors import (
    CollisionError,
    DigitOverflowError,
    MissingTableEntryError,
    ValidationError,
)
from .numsys import BaseSystem, Representation

DEFAULT_TABLE_LIMIT = 10**4


@dataclass(frozen=True)
class GreedyResult:
    representation: Representation
    steps: int
    used_table: bool = False
    collisions: tuple[int, ...] = ()

    @property
    def weight(self) -> int:
        return self.representation.weight


def _greedy_phase(
    system: BaseSystem, n: int, stop: int, monoid: TruncatedMonoid | None
) -> tuple[dict[int, list], int, int]:
    """Subtract largest power-products while the remainder exceeds ``stop``."""
    counts: dict[int, list] = {}
    steps = 0
    rem = n
    while rem > stop:
        pp = largest_leq(system, rem, monoid)
        entry = counts.setdefault(pp.value, [pp, 0])
        entry[1] += 1
        rem -= pp.value
        steps += 1
    return counts, steps, rem


def _finish(system: BaseSystem, counts: dict[int, list]) -> Representation:
    for value, (_pp, k) in counts.items():
        if k not in system.digits:
            raise DigitOverflowError(
                f"power-product {value} taken {k} times but {k} is not in D={list(system.digits)}"
            )
    return Representation(system, tuple((pp, k) for pp, k in counts.values()))


def greedy_encode(system: BaseSystem, n: int, monoid: TruncatedMonoid | None = None) -> GreedyResult:
    """Repeatedly subtract the largest power-product not exceeding the remainder.

    A power-product taken ``k`` times gets digit ``k``; raises
    ``DigitOverflowError`` if ``k`` is not in the digit set.
    """
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    counts, steps, _ = _greedy_phase(system, n, 0, monoid)
    return GreedyResult(_finish(system, counts), steps)


def greedy_encode_with_table(
    system: BaseSystem,
    n: int,
    table: Mapping[int, Representation],
    monoid: TruncatedMonoid | None = None,
) -> GreedyResult:
    """Greedy down to the table's range, then splice in the table entry.

    The table must cover ``0..N0`` where ``N0 = max(table)``. If a table term
    shares its power-product with a greedy term the digits are added, and
    ``CollisionError`` is raised when the sum is not in the digit set.
    """
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    if not table:
        raise MissingTableEntryError("empty table")
    n0 = max(table)
    counts, steps, rem = _greedy_phase(system, n, n0, monoid)
    if rem not in table:
        raise MissingTableEntryError(f"table has no entry for {rem}")
    collisions = []
    for pp, d in table[rem].terms:
        if pp.value in counts:
            merged = counts[pp.value][1] + d
            if merged not in system.digits:
                raise CollisionError(
                    f"table term {d}*{pp.value} collides with greedy multiplicity "
                    f"{counts[pp.value][1]}; {merged} is not in D"
                )
            counts[pp.value][1] = merged
            collisions.append(pp.value)
        else:
            counts[pp.value] = [pp, d]
    rep = _finish(system, counts)
    return GreedyResult(rep, steps, used_table=True, collisions=tuple(collisions))


def build_table(system: BaseSystem, limit: int = DEFAULT_TABLE_LIMIT) -> dict[int, Representation]:
    """Minimal-weight representations of ``0..limit`` from the exact solver."""
    from .minweight import MinWeightSolver

    solver = MinWeightSolver(system, limit)
    table = {0: Representation(system)}
    for m in range(1, limit + 1):
        table[m] = solver.solve(m).representation
    return table


def normalized(value: int, n: int) -> float:
    """``value * log log n / log n`` for n >= 3."""
    ln = math.log(n)
    return value * math.log(ln) / ln


@dataclass
class GreedyProfile:
    n_from: int
    n_to: int
    steps: dict[int, int] = field(default_factory=dict)
    weights: dict[int, int] = field(default_factory=dict)
    records: list[tuple[int, int]] = field(default_factory=list)
    errors: dict[int, str] = field(default_factory=dict)
    roundtrip_failures: list[int] = field(default_factory=list)

    def normalized(self, n: int) -> float | None:
        return normalized(self.steps[n], n) if n >= 3 and n in self.steps else None

    def max_steps(self) -> int:
        return max(self.steps.values(), default=0)

    def max_normalized(self) -> tuple[int, float]:
        best = max(
            ((n, normalized(s, n)) for n, s in self.steps.items() if n >= 3),
            key=lambda t: t[1],
        )
        return best

    def rows(self):
        for n in range(self.n_from, self.n_to + 1):
            if n in self.steps:
                yield n, self.steps[n], self.weights[n], self.normalized(n)


def greedy_profile(system: BaseSystem, n_from: int, n_to: int) -> GreedyProfile:
    """Greedy step counts over ``[n_from, n_to]`` with running records.

    Errors for individual ``n`` are collected rather than raised. Every
    encoding is summed back and compared against ``n``.
    """
    if not 1 <= n_from <= n_to:
        raise ValidationError(f"need 1 <= n_from <= n_to, got {n_from}, {n_to}")
    monoid = enumerate_power_products(system, n_to)
    values = monoid.values
    digits = set(system.digits)
    profile = GreedyProfile(n_from, n_to)
    best = 0
    for n in range(n_from, n_to + 1):
        rem = n
        steps = 0
        total = 0
        last = 0
        run = 0
        weight = 0
        overflow = None
        # terms come out non-increasing, so repeats are adjacent
        while rem:
            B = values[bisect_right(values, rem) - 1]
            if B == last:
                run += 1
            else:
                if run and run not in digits:
                    overflow = (last, run)
                last, run = B, 1
                weight += 1
            rem -= B
            total += B
            steps += 1
        if run and run not in digits:
            overflow = (last, run)
        if total != n:
            profile.roundtrip_failures.append(n)
        if overflow is not None:
            err = DigitOverflowError(f"{overflow[0]} taken {overflow[1]} times")
            profile.errors[n] = str(err)
            continue
        profile.steps[n] = steps
        profile.weights[n] = weight
        if steps > best:
            best = steps
            profile.records.append((n, steps))
    return profile

