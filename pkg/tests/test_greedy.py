import math

import pytest

from mbrep import BaseSystem, Representation, enumerate_power_products, greedy_encode, greedy_encode_with_table
from mbrep.errors import CollisionError, DigitOverflowError, MissingTableEntryError, ValidationError
from mbrep.greedy import build_table, greedy_profile, normalized

# frozen from the first run over 1..10^6 with bases {2,3}, D = {0,1}
STEP_RECORDS_1E6 = [(1, 1), (5, 2), (23, 3), (185, 4), (1721, 5), (15545, 6), (277689, 7)]


def test_greedy_41(s23):
    res = greedy_encode(s23, 41)
    assert res.representation.as_dict() == {36: 1, 4: 1, 1: 1}
    assert res.steps == 3 and res.weight == 3


def test_greedy_zero(s23):
    res = greedy_encode(s23, 0)
    assert res.weight == 0 and res.steps == 0
    assert str(res.representation) == "0"


def test_greedy_negative(s23):
    with pytest.raises(ValidationError):
        greedy_encode(s23, -1)


def test_greedy_power_product_is_one_step(s23):
    for n in (1, 2, 3, 6, 2**40 * 3**25):
        assert greedy_encode(s23, n).steps == 1


def test_greedy_digit_overflow():
    # single base 3 with D = {0,1}: 2 = 1 + 1 needs digit 2
    with pytest.raises(DigitOverflowError):
        greedy_encode(BaseSystem((3,)), 2)


def test_greedy_multiplicity_becomes_digit():
    s = BaseSystem((3,), (0, 1, 2))
    res = greedy_encode(s, 8)
    assert res.representation.as_dict() == {3: 2, 1: 2}
    assert res.steps == 4 and res.weight == 2


def test_greedy_with_monoid_agrees(s23):
    mono = enumerate_power_products(s23, 5000)
    for n in range(1, 5001, 13):
        assert greedy_encode(s23, n, mono) == greedy_encode(s23, n)


def test_greedy_large_roundtrip(s23):
    n = 3**500 + 2**700 + 12345
    rep = greedy_encode(s23, n).representation
    assert rep.value == n
    values = [pp.value for pp, _ in rep.terms]
    assert values == sorted(values, reverse=True)


def test_table_variant_41(s23):
    table = build_table(s23, 100)
    res = greedy_encode_with_table(s23, 41, table)
    assert res.weight == 2 and res.steps == 0 and res.used_table


def test_table_variant_never_heavier(s23):
    table = build_table(s23, 200)
    mono = enumerate_power_products(s23, 5000)
    for n in range(1, 5001, 3):
        t = greedy_encode_with_table(s23, n, table, mono)
        assert t.representation.value == n
        assert t.weight <= greedy_encode(s23, n, mono).weight


def test_table_missing_entry(s23):
    table = {0: Representation(s23), 1: Representation.from_values(s23, {1: 1}), 3: Representation.from_values(s23, {3: 1})}
    with pytest.raises(MissingTableEntryError):
        greedy_encode_with_table(s23, 2, table)
    with pytest.raises(MissingTableEntryError):
        greedy_encode_with_table(s23, 2, {})


def test_table_collision_merge():
    s = BaseSystem((3,), (0, 1, 2))
    # greedy takes 9 from 18 and leaves 9, whose table entry is 9 itself
    res = greedy_encode_with_table(s, 18, build_table(s, 10))
    assert res.representation.as_dict() == {9: 2}
    assert res.collisions == (9,)


def test_table_collision_error():
    s = BaseSystem((3,), (0, 1, 3))
    table = {9: Representation.from_values(s, {9: 1}), 10: Representation.from_values(s, {9: 1, 1: 1})}
    with pytest.raises(CollisionError):
        greedy_encode_with_table(s, 18, table)


def test_normalized():
    assert normalized(7, 277689) == pytest.approx(7 * math.log(math.log(277689)) / math.log(277689))


def test_profile_small(s23):
    prof = greedy_profile(s23, 1, 10**4)
    assert prof.records == STEP_RECORDS_1E6[:5]
    assert prof.errors == {} and prof.roundtrip_failures == []
    mono = enumerate_power_products(s23, 10**4)
    for n in range(1, 10**4 + 1, 17):
        res = greedy_encode(s23, n, mono)
        assert prof.steps[n] == res.steps
        assert prof.weights[n] == res.weight


def test_profile_collects_errors():
    prof = greedy_profile(BaseSystem((3,)), 1, 10)
    assert set(prof.errors) == {2, 5, 6, 7, 8}
    assert 2 not in prof.steps


def test_profile_bad_range(s23):
    with pytest.raises(ValidationError):
        greedy_profile(s23, 5, 4)
