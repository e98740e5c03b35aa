import math

import pytest
from conftest import brute_min_weights

from mbrep import BaseSystem, counting_check, minimal_weight_exact, weight_profile
from mbrep.errors import BudgetExceededError, ResourceLimitError, UnrepresentableError, ValidationError
from mbrep.minweight import UNREACHABLE, MinWeightSolver, reuse_lower_bound_table, unrepresentable_upto

# frozen from the first sweep up to 2^20 with bases {2,3}, D = {0,1}
WEIGHT_RECORDS_2_20 = [(1, 1), (5, 2), (23, 3), (431, 4), (18431, 5)]


def test_minweight_41(s23):
    res = minimal_weight_exact(s23, 41)
    assert res.weight == 2
    assert res.representation.as_dict() == {32: 1, 9: 1}
    assert str(res.representation) == "2^5 + 3^2"


def test_minweight_power_product(s23):
    assert minimal_weight_exact(s23, 2**10 * 3**4).weight == 1


def test_solver_vs_brute_small(s35):
    s = BaseSystem((3, 5), (0, 1, 2))
    brute = brute_min_weights(s.bases, s.digits, 300, 4)
    solver = MinWeightSolver(s, 300)
    for n in range(1, 301):
        if brute[n] is not None:
            assert solver.solve(n).weight == brute[n], n


def test_budget_and_unrepresentable(s23, s35):
    with pytest.raises(BudgetExceededError):
        minimal_weight_exact(s23, 41, weight_budget=1)
    with pytest.raises(UnrepresentableError):
        minimal_weight_exact(s35, 2)
    with pytest.raises(ValidationError):
        minimal_weight_exact(s23, 0)


def test_unrepresentable_upto(s35):
    missing = unrepresentable_upto(s35, 1000)
    assert missing[0] == 2 and len(missing) == 4
    brute = brute_min_weights(s35.bases, s35.digits, 1000, 6)
    solver = MinWeightSolver(s35, 1000)
    for n in missing:
        with pytest.raises(UnrepresentableError):
            solver.solve(n)
    assert all(brute[n] is None for n in missing)


def test_reuse_lower_bound(s23, s35):
    lb = reuse_lower_bound_table(s23, 1000)
    assert lb[0] == 0 and lb[41] == 2 and lb[36] == 1
    assert reuse_lower_bound_table(s35, 10)[:5] == [0, 1, 2, 1, 2]
    # admissible: never above the true minimal weight
    prof = weight_profile(s23, 1000)
    assert all(lb[n] <= prof.weight(n) for n in range(1, 1001))
    assert reuse_lower_bound_table(BaseSystem((3,)), 10)[2] == 2
    assert UNREACHABLE not in reuse_lower_bound_table(s23, 100)


def test_weight_profile_matches_solver(s23):
    prof = weight_profile(s23, 3000)
    solver = MinWeightSolver(s23, 3000)
    for n in range(1, 3001, 11):
        assert prof.weight(n) == solver.solve(n).weight


def test_weight_profile_records(s23):
    prof = weight_profile(s23, 2**20)
    assert prof.records == WEIGHT_RECORDS_2_20
    assert prof.max_weight() == 5
    assert prof.unrepresentable() == []
    maxima = prof.dyadic_maxima()
    assert maxima[-1][0] == 20 and maxima[-1][2] == 5


def test_weight_profile_unrepresentable(s35):
    prof = weight_profile(s35, 1000)
    assert prof.unrepresentable() == unrepresentable_upto(s35, 1000)


def test_weight_profile_cap(s23, monkeypatch):
    import mbrep.minweight as mw

    monkeypatch.setattr(mw, "BITSET_CAP", 100)
    with pytest.raises(ResourceLimitError):
        weight_profile(s23, 1000)


def test_counting_check_2_20(s23):
    chk = counting_check(s23, 2**20, 2)
    assert chk.t_bound == 273
    assert chk.monoid_size == 143
    assert chk.distinct_representable == 8442
    assert chk.binom_bound == 273 + math.comb(273, 2) == 37401
    assert chk.crude_bound == 74529
    assert chk.crude_bound_full == 298116
    assert chk.dyadic_count == 2**19
    assert chk.chain_holds and chk.forces_heavier


@pytest.mark.parametrize("N", [10**3, 10**4])
@pytest.mark.parametrize("K", [1, 2])
def test_counting_chain(s23, N, K):
    chk = counting_check(s23, N, K)
    assert chk.distinct_representable <= chk.binom_bound <= chk.crude_bound <= chk.crude_bound_full


def test_counting_matches_profile(s23):
    chk = counting_check(s23, 5000, 2)
    prof = weight_profile(s23, 5000)
    # distinct values of weight <= 2 that fit under N, plus those that sum above N
    assert chk.distinct_representable >= sum(1 for n in range(1, 5001) if prof.weight(n) <= 2)


def test_counting_cap(s23):
    with pytest.raises(ResourceLimitError):
        counting_check(s23, 2**20, 4, cap=1000)
