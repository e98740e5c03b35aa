from hypothesis import given, settings
from hypothesis import strategies as st

from mbrep import BaseSystem, enumerate_power_products, greedy_encode, largest_leq
from mbrep.commsim import SummandCodec, encode_message
from mbrep.enumeration import floor_log
from mbrep.errors import DigitOverflowError
from mbrep.expbench import expmod_multibase
from mbrep.minweight import MinWeightSolver

S23 = BaseSystem((2, 3))
S23_SOLVER = MinWeightSolver(S23, 3000)
SYSTEMS = st.sampled_from(
    [BaseSystem((2, 3)), BaseSystem((3, 5), (0, 1, 2)), BaseSystem((2, 3, 5)), BaseSystem((2, 5), (0, 1, 3)), BaseSystem((3, 7))]
)


@given(b=st.integers(2, 50), n=st.integers(1, 2**300))
def test_floor_log_bracket(b, n):
    e = floor_log(b, n)
    assert b**e <= n < b ** (e + 1)


def best_below(bases, n):
    """Oracle: loop over all exponents of every base but the last, which is solved directly."""
    *head, last = bases
    best = 0

    def walk(j, partial):
        nonlocal best
        if j == len(head):
            best = max(best, partial * last ** floor_log(last, n // partial))
            return
        while partial <= n:
            walk(j + 1, partial)
            partial *= head[j]

    walk(0, 1)
    return best


@given(system=SYSTEMS, n=st.integers(1, 2**200))
def test_largest_leq_is_maximal(system, n):
    pp = largest_leq(system, n)
    assert pp.check(system.bases)
    assert pp.value == best_below(system.bases, n)


@given(n=st.integers(1, 5000))
def test_largest_leq_vs_monoid(n):
    vals = enumerate_power_products(S23, 5000).values
    assert largest_leq(S23, n).value == max(v for v in vals if v <= n)


@given(n=st.integers(0, 2**512))
def test_greedy_roundtrip_wide(n):
    res = greedy_encode(S23, n)
    assert res.representation.value == n
    assert res.steps == res.weight


@given(n=st.integers(1, 3000))
@settings(max_examples=200)
def test_exact_never_exceeds_greedy(n):
    exact = S23_SOLVER.solve(n)
    assert exact.representation.value == n
    assert exact.lower_bound <= exact.weight <= greedy_encode(S23, n).weight


@given(system=SYSTEMS, ell=st.integers(1, 300), data=st.data())
def test_codec_roundtrip(system, ell, data):
    m = data.draw(st.integers(0, 2**ell - 1))
    codec = SummandCodec(system, ell)
    try:
        rep = greedy_encode(system, m).representation
    except DigitOverflowError:
        return  # {3,7} with D={0,1} has no digit for a repeated term
    bits = codec.encode(rep)
    assert len(bits) == codec.stream_bits(rep.weight)
    assert codec.decode(bits) == rep
    assert encode_message(system, m, ell) == bits


@given(x=st.integers(0, 10**6), n=st.integers(0, 10**6), m=st.integers(2, 10**9))
def test_multibase_pow(x, n, m):
    assert expmod_multibase(S23, x, n, m).value == pow(x, n, m)
