"""Modular exponentiation driven by a multi-base representation of the exponent.

Every modular multiplication is counted, squarings included.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .commsim import represent, sample_rng
from .errors import ValidationError
from .numsys import BaseSystem, Representation

COUNTING = "every modular multiplication, squarings included"


@dataclass(frozen=True)
class ExpResult:
    value: int
    mult_count: int
    method: str


def _binary_pow(v: int, e: int, m: int) -> tuple[int, int]:
    """Left-to-right square-and-multiply; returns ``(v**e % m, multiplications)``."""
    if e == 0:
        return 1 % m, 0
    acc = v % m
    count = 0
    for bit in bin(e)[3:]:
        acc = acc * acc % m
        count += 1
        if bit == "1":
            acc = acc * v % m
            count += 1
    return acc, count


def expmod_binary(x: int, n: int, m: int) -> ExpResult:
    if m < 2 or n < 0:
        raise ValidationError(f"need m >= 2 and n >= 0, got m={m}, n={n}")
    value, count = _binary_pow(x % m, n, m)
    return ExpResult(value, count, "binary")


def _lattice_powers(rep: Representation, x: int, m: int) -> tuple[dict[tuple[int, ...], int], int]:
    """``x**B % m`` for every ``B`` in the support, walked from ``x**1``.

    Targets are visited by ascending total exponent. Each starts from the
    cached vector below it (componentwise) with the largest total exponent
    and raises to ``b_j`` one exponent step at a time, base by base;
    intermediate vectors are cached as well.
    """
    bases = rep.system.bases
    r = len(bases)
    cache = {(0,) * r: x % m}
    count = 0
    targets = sorted((pp.exponents for pp, _ in rep.terms), key=lambda a: (sum(a), a))
    for target in targets:
        if target in cache:
            continue
        below = [v for v in cache if all(bj <= aj for bj, aj in zip(v, target))]
        start = max(below, key=lambda v: (sum(v), v))
        cur = list(start)
        val = cache[start]
        for j in range(r):
            while cur[j] < target[j]:
                val, c = _binary_pow(val, bases[j], m)
                count += c
                cur[j] += 1
                cache[tuple(cur)] = val
    return cache, count


def expmod_multibase(
    system: BaseSystem, x: int, n: int, m: int, encoder: str = "greedy", rep: Representation | None = None
) -> ExpResult:
    """``x**n % m`` as the product of ``(x**B) ** d_B`` over a representation of ``n``."""
    if m < 2 or n < 0:
        raise ValidationError(f"need m >= 2 and n >= 0, got m={m}, n={n}")
    method = f"multibase({encoder})"
    if n == 0:
        return ExpResult(1 % m, 0, method)
    rep = rep if rep is not None else represent(system, n, encoder)
    if rep.value != n:
        raise ValidationError(f"representation evaluates to {rep.value}, not {n}")
    cache, count = _lattice_powers(rep, x, m)
    acc = None
    for pp, d in rep.terms:
        term, c = _binary_pow(cache[pp.exponents], d, m)
        count += c
        if acc is None:
            acc = term
        else:
            acc = acc * term % m
            count += 1
    return ExpResult(acc, count, method)


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    binary: int
    multibase: int
    weight: int
    agree: bool

    @property
    def ratio(self) -> float:
        return self.multibase / self.binary if self.binary else float("nan")


def count_comparison(
    system: BaseSystem, n_samples: int, bit_size: int, seed: int = 7, encoder: str = "greedy"
) -> list[ComparisonRow]:
    """Both methods on seeded random ``bit_size``-bit exponents and moduli."""
    if bit_size < 2:
        raise ValidationError(f"bit size must be >= 2, got {bit_size}")
    rows = []
    for i in range(n_samples):
        rng = sample_rng(seed, bit_size, i)
        n = rng.getrandbits(bit_size) | 1 << (bit_size - 1)
        m = rng.getrandbits(bit_size) | 1 << (bit_size - 1) | 1
        x = rng.randrange(2, m)
        rep = represent(system, n, encoder)
        a = expmod_binary(x, n, m)
        b = expmod_multibase(system, x, n, m, encoder, rep=rep)
        rows.append(ComparisonRow(n, a.mult_count, b.mult_count, rep.weight, a.value == b.value))
    return rows


def summarize(rows: list[ComparisonRow]) -> dict:
    return {
        "samples": len(rows),
        "mean_binary": statistics.fmean(r.binary for r in rows),
        "mean_multibase": statistics.fmean(r.multibase for r in rows),
        "mean_ratio": statistics.fmean(r.ratio for r in rows),
        "all_agree": all(r.agree for r in rows),
    }
