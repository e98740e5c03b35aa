"""The nine acceptance criteria, each at its stated tolerance and time limit.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import time

import pytest
from conftest import brute_min_weights

from mbrep import BaseSystem, counting_check, enumerate_power_products, greedy_encode, greedy_profile, weight_profile
from mbrep.commsim import EQUAL, NOT_EQUAL, SummandCodec, run_equality_protocol, sample_rng
from mbrep.diophantine import PrecisionPolicy, fit_lemma_constants, log_ratio, three_gap_sweep
from mbrep.expbench import count_comparison, expmod_binary, expmod_multibase
from mbrep.minweight import MinWeightSolver

# frozen on the first run of the 3..10^6 greedy profile for {2,3}, D = {0,1}
GREEDY_NORMALIZED_GOLDEN = 1.4120707863511865


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


S23 = BaseSystem((2, 3))


@pytest.mark.criterion(1, "41 has minimal weight 2 = 32 + 9; greedy gives 36 + 4 + 1")
def test_criterion_1_counterexample():
    with Timer(1):
        from mbrep import minimal_weight_exact

        exact = minimal_weight_exact(S23, 41)
        greedy = greedy_encode(S23, 41)
    assert exact.weight == 2
    assert exact.representation.as_dict() == {32: 1, 9: 1}
    assert greedy.weight == 3
    assert greedy.representation.as_dict() == {36: 1, 4: 1, 1: 1}


@pytest.mark.criterion(2, "exact solver equals brute force (supports <= 4 over B_500) for n <= 500")
def test_criterion_2_oracle_equivalence():
    with Timer(60):
        brute = brute_min_weights(S23.bases, S23.digits, 500, 4)
        solver = MinWeightSolver(S23, 500)
        exact = [solver.solve(n).weight for n in range(1, 501)]
    assert all(brute[n] is not None for n in range(1, 501))
    assert exact == brute[1:]


def ternary_nonzero(n):
    count = 0
    while n:
        n, r = divmod(n, 3)
        count += r != 0
    return count


@pytest.mark.criterion(3, "single-base weights equal binary popcount and nonzero ternary digits, n <= 10^4")
def test_criterion_3_single_base():
    with Timer(60):
        s2 = MinWeightSolver(BaseSystem((2,)), 10**4)
        s3 = MinWeightSolver(BaseSystem((3,), (0, 1, 2)), 10**4)
        binary = [s2.solve(n).weight for n in range(1, 10**4 + 1)]
        ternary = [s3.solve(n).weight for n in range(1, 10**4 + 1)]
    assert binary == [bin(n).count("1") for n in range(1, 10**4 + 1)]
    assert ternary == [ternary_nonzero(n) for n in range(1, 10**4 + 1)]


@pytest.mark.criterion(4, "((|D|-1) T)^2 = 74529 < 2^19 at N = 2^20, a weight >= 3 exists, bound chain holds")
def test_criterion_4_counting():
    with Timer(600):
        chk = counting_check(S23, 2**20, 2)
        prof = weight_profile(S23, 2**20)
        chains = [counting_check(S23, N, K) for N in (10**3, 10**4) for K in (1, 2)]
    assert chk.t_bound == 273
    assert chk.crude_bound == 74529 < 2**19
    assert chk.forces_heavier
    heavy = [n for n in range(2**19 + 1, 2**20 + 1) if prof.weight(n) >= 3]
    assert heavy
    for c in chains:
        assert c.distinct_representable <= c.binom_bound <= c.crude_bound
        # the looser form with every digit counted sits above both
        assert c.crude_bound <= c.crude_bound_full
        assert c.binom_bound == sum(math.comb(c.t_bound, k) for k in range(1, c.K + 1))


@pytest.mark.criterion(5, "three-gap invariant for log2 3, M = 1..10^4, 256 bits, tolerance 1e-12")
def test_criterion_5_three_gap():
    policy = PrecisionPolicy(mantissa_bits=256, cluster_tolerance=1e-12)
    with Timer(120):
        lam = log_ratio(2, 3, policy)
        bad = []
        for M, groups, ok in three_gap_sweep(lam, 10**4, policy):
            if len(groups) > 3:
                bad.append(M)
            elif len(groups) == 3:
                small, mid, big = groups
                if abs(big - (mid + small)) > 1e-12 * big or not ok:
                    bad.append(M)
    assert bad == []


@pytest.mark.criterion(6, "fit (C, kappa) on [10^3, 10^4]; zero violations on 10^4 samples of (10^4, 10^6]")
def test_criterion_6_lemma_fit():
    with Timer(300):
        fit = fit_lemma_constants(2, 3, (10**3, 10**4), (10**4 + 1, 10**6), samples=10**4, seed=0)
    summary = ", ".join(f"kappa={r['kappa']}: {r['violations']}" for r in fit.candidates)
    assert fit.accepted and fit.kappa >= 0.05, f"no kappa accepted; violations per kappa: {summary}"
    row = next(r for r in fit.candidates if r["kappa"] == fit.kappa)
    assert row["violations"] == 0


@pytest.mark.criterion(7, "max greedy steps * loglog n / log n on [3, 10^6] within frozen golden; round-trips")
def test_criterion_7_greedy_bound():
    with Timer(300):
        prof = greedy_profile(S23, 1, 10**6)
        monoid = enumerate_power_products(S23, 10**6)
        failures = [n for n in range(1, 10**6 + 1) if greedy_encode(S23, n, monoid).representation.value != n]
    n_star, value = prof.max_normalized()
    assert value <= GREEDY_NORMALIZED_GOLDEN
    assert prof.errors == {} and prof.roundtrip_failures == []
    assert failures == []
    assert prof.max_steps() == 7


def message_pair(i, ell):
    rng = sample_rng(2024, ell, i)
    a = rng.getrandbits(ell)
    kind = i % 4
    if kind == 0:
        b = a
    elif kind == 1:
        b = rng.getrandbits(ell)
    elif kind == 2:
        b = a ^ (1 << rng.randrange(ell))
    else:
        b = (a + 1) % (1 << ell)
    return a, b


@pytest.mark.criterion(8, "10^4 protocol runs at l = 64 decide correctly; codec round-trips; record size bound")
def test_criterion_8_protocol():
    ell = 64
    codec = SummandCodec(S23, ell)
    bound = math.ceil(math.log2(len(S23.digits))) + sum(math.ceil(math.log2(ell / math.log2(b) + 1)) for b in S23.bases)
    wrong = []
    with Timer(60):
        for i in range(10**4):
            a, b = message_pair(i, ell)
            tr = run_equality_protocol(S23, a, b, ell)
            if tr.decision != (EQUAL if a == b else NOT_EQUAL):
                wrong.append(i)
            stream = "".join(tr.chunks)
            if codec.decode(stream).value != a:
                wrong.append(i)
    assert wrong == []
    assert codec.record_bits <= bound


@pytest.mark.criterion(9, "multibase and binary exponentiation agree on 10^3 256-bit triples; 2^41 mod 1000 = 552")
def test_criterion_9_expbench():
    with Timer(60):
        rows = count_comparison(S23, 1000, 256, seed=7)
        small = (expmod_binary(2, 41, 1000), expmod_multibase(S23, 2, 41, 1000))
    assert all(r.agree for r in rows)
    assert [r.value for r in small] == [552, 552]
