"""Base systems, power-products and multi-base representations.

A base system is a tuple of bases ``b_1, ..., b_r`` (integers > 1) together
with a finite digit set ``D`` of nonnegative integers containing 0 and 1.
Everything here uses exact integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ValidationError

TRIAL_DIVISION_LIMIT = 2**63


def _prime_factors(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def factor_exponent_matrix(bases: Sequence[int]) -> tuple[tuple[int, ...], list[list[int]]]:
    """Prime-exponent matrix of ``bases``.

    Returns ``(primes, matrix)`` where ``primes`` is the ascending union of
    primes dividing any base and ``matrix[j][i]`` is the exponent of
    ``primes[i]`` in ``bases[j]``.
    """
    for b in bases:
        if not isinstance(b, int) or b <= 1:
            raise ValidationError(f"base must be an integer > 1, got {b!r}")
        if b > TRIAL_DIVISION_LIMIT:
            raise ValidationError(f"base {b} too large for trial division")
    factored = [_prime_factors(b) for b in bases]
    primes = tuple(sorted({p for f in factored for p in f}))
    matrix = [[f.get(p, 0) for p in primes] for f in factored]
    return primes, matrix


def rational_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals, by exact Gaussian elimination."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                factor = rows[i][col] / rows[rank][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def is_mult_independent_set(bases: Sequence[int]) -> bool:
    """True iff no nontrivial signed exponent vector maps the bases to 1."""
    _, matrix = factor_exponent_matrix(bases)
    return rational_rank(matrix) == len(bases)


def independent_pairs(bases: Sequence[int]) -> list[tuple[int, int]]:
    return [(p, q) for p, q in combinations(bases, 2) if is_mult_independent_set([p, q])]


@dataclass(frozen=True)
class BaseSystem:
    """Bases and digit set. Digits are stored sorted ascending."""

    bases: tuple[int, ...]
    digits: tuple[int, ...] = (0, 1)

    def __post_init__(self) -> None:
        bases = tuple(self.bases)
        digits = tuple(sorted(set(self.digits)))
        if not bases:
            raise ValidationError("at least one base is required")
        for b in bases:
            if not isinstance(b, int) or isinstance(b, bool) or b <= 1:
                raise ValidationError(f"base must be an integer > 1, got {b!r}")
        if len(set(bases)) != len(bases):
            raise ValidationError(f"duplicate bases in {bases}")
        for d in digits:
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise ValidationError(f"digits must be nonnegative integers, got {d!r}")
        if 0 not in digits or 1 not in digits:
            raise ValidationError(f"digit set must contain 0 and 1, got {digits}")
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "digits", digits)

    @property
    def r(self) -> int:
        return len(self.bases)

    @property
    def max_digit(self) -> int:
        return self.digits[-1]

    @property
    def nonzero_digits(self) -> tuple[int, ...]:
        return self.digits[1:]

    @cached_property
    def full_set_independent(self) -> bool:
        return is_mult_independent_set(self.bases)

    @cached_property
    def pairwise_independent_pairs(self) -> list[tuple[int, int]]:
        return independent_pairs(self.bases)

    def power_product(self, exponents: Sequence[int]) -> PowerProduct:
        return PowerProduct.build(self.bases, exponents)

    def to_config(self) -> dict:
        return {"bases": list(self.bases), "digits": list(self.digits)}


def load_system(path: str | Path) -> BaseSystem:
    """Read a base system from a ``key = value`` config file.

    Recognised keys are ``bases = [..]`` and ``digits = [..]``; ``digits``
    defaults to ``[0, 1]``.
    """
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"cannot parse config {path}: {exc}") from exc
    if "bases" not in data:
        raise ValidationError(f"config {path} has no 'bases' key")
    return BaseSystem(tuple(data["bases"]), tuple(data.get("digits", (0, 1))))


@dataclass(frozen=True, order=True)
class PowerProduct:
    """``value = prod(b_j ** exponents[j])``; ordered by value."""

    value: int
    exponents: tuple[int, ...] = field(compare=False)

    @classmethod
    def build(cls, bases: Sequence[int], exponents: Sequence[int]) -> PowerProduct:
        if len(exponents) != len(bases):
            raise ValidationError(f"expected {len(bases)} exponents, got {len(exponents)}")
        value = 1
        for b, a in zip(bases, exponents):
            if a < 0:
                raise ValidationError(f"exponents must be nonnegative, got {tuple(exponents)}")
            value *= b**a
        return cls(value, tuple(exponents))

    def check(self, bases: Sequence[int]) -> bool:
        return PowerProduct.build(bases, self.exponents).value == self.value


def exponents_of(bases: Sequence[int], value: int) -> tuple[int, ...] | None:
    """Some exponent vector with ``prod(b_j ** a_j) == value``, or None."""
    if value < 1:
        return None

    def search(j: int, rest: int) -> list[int] | None:
        if j == len(bases) - 1:
            a = 0
            while rest % bases[j] == 0:
                rest //= bases[j]
                a += 1
            return [a] if rest == 1 else None
        a, cur = 0, rest
        found = None
        while True:
            tail = search(j + 1, cur)
            if tail is not None:
                found = [a] + tail
                break
            if cur % bases[j]:
                break
            cur //= bases[j]
            a += 1
        return found

    found = search(0, value)
    return tuple(found) if found is not None else None


@dataclass(frozen=True)
class Representation:
    """Sparse multi-base representation ``n = sum(d_B * B)``.

    ``terms`` holds ``(PowerProduct, digit)`` pairs sorted by descending
    power-product value; every digit is a nonzero element of the digit set.
    """

    system: BaseSystem
    terms: tuple[tuple[PowerProduct, int], ...] = ()

    def __post_init__(self) -> None:
        terms = tuple(sorted(self.terms, key=lambda t: t[0].value, reverse=True))
        seen = set()
        for pp, d in terms:
            if d == 0 or d not in self.system.digits:
                raise ValidationError(f"digit {d} for {pp.value} is not a nonzero element of D")
            if not pp.check(self.system.bases):
                raise ValidationError(f"power-product {pp} inconsistent with bases")
            if pp.value in seen:
                raise ValidationError(f"power-product {pp.value} used twice")
            seen.add(pp.value)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_values(cls, system: BaseSystem, mapping: Mapping[int, int]) -> Representation:
        """Build from ``{B: d_B}``; zero digits are dropped."""
        terms = []
        for value, d in mapping.items():
            if d == 0:
                continue
            exps = exponents_of(system.bases, value)
            if exps is None:
                raise ValidationError(f"{value} is not a power-product of {system.bases}")
            terms.append((PowerProduct(value, exps), d))
        return cls(system, tuple(terms))

    @property
    def weight(self) -> int:
        return len(self.terms)

    @cached_property
    def value(self) -> int:
        return sum(d * pp.value for pp, d in self.terms)

    def as_dict(self) -> dict[int, int]:
        return {pp.value: d for pp, d in self.terms}

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "weight": self.weight,
            "terms": [
                {"B": pp.value, "digit": d, "exponents": list(pp.exponents)}
                for pp, d in self.terms
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for pp, d in self.terms:
            factors = [f"{b}^{a}" for b, a in zip(self.system.bases, pp.exponents) if a]
            body = "*".join(factors) or "1"
            parts.append(body if d == 1 else f"{d}*{body}")
        return " + ".join(parts)


def evaluate(rep: Representation) -> int:
    return rep.value


@dataclass(frozen=True)
class ValidationReport:
    bases: tuple[int, ...]
    digits: tuple[int, ...]
    pairwise_independent_pairs: list[tuple[int, int]]
    full_set_independent: bool
    completeness: str
    completeness_limit: int | None = None
    unrepresentable_example: int | None = None
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "bases": list(self.bases),
            "digits": list(self.digits),
            "pairwise_independent_pairs": [list(p) for p in self.pairwise_independent_pairs],
            "full_set_independent": self.full_set_independent,
            "completeness": {
                "status": self.completeness,
                "limit": self.completeness_limit,
                "unrepresentable_example": self.unrepresentable_example,
            },
            "diagnostics": list(self.diagnostics),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


GUARANTEED = "guaranteed"
EXHAUSTIVE = "exhaustively-checked"
UNKNOWN = "unknown"


def validate_system(system: BaseSystem, completeness_limit: int = 1000) -> ValidationReport:
    """Independence flags and a three-tier representability verdict."""
    from .minweight import unrepresentable_upto

    diagnostics = []
    pairs = system.pairwise_independent_pairs
    full = system.full_set_independent
    if not full:
        diagnostics.append(f"bases {list(system.bases)} are multiplicatively dependent")
    if system.r >= 2 and not pairs:
        diagnostics.append("no multiplicatively independent pair of bases")
    if system.r < 2:
        diagnostics.append("single base: bound verification needs r >= 2")

    example = None
    limit = None
    if set(range(min(system.bases))) <= set(system.digits):
        status = GUARANTEED
    else:
        missing = unrepresentable_upto(system, completeness_limit)
        if missing:
            status = UNKNOWN
            example = missing[0]
            diagnostics.append(
                f"{len(missing)} integers in [1, {completeness_limit}] have no representation, "
                f"the smallest is {example}"
            )
        else:
            status = EXHAUSTIVE
            limit = completeness_limit
            diagnostics.append(
                f"every n <= {completeness_limit} representable; larger n not checked"
            )
    return ValidationReport(
        bases=system.bases,
        digits=system.digits,
        pairwise_independent_pairs=pairs,
        full_set_independent=full,
        completeness=status,
        completeness_limit=limit,
        unrepresentable_example=example,
        diagnostics=diagnostics,
    )

