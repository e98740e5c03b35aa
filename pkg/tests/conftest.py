import itertools

import pytest

from mbrep import BaseSystem


@pytest.fixture
def s23():
    return BaseSystem((2, 3))


@pytest.fixture
def s35():
    return BaseSystem((3, 5))


def brute_power_products(bases, N):
    """Power-products <= N by nested loops over exponent ranges."""
    out = set()
    ranges = []
    for b in bases:
        e = 0
        while b ** (e + 1) <= N:
            e += 1
        ranges.append(range(e + 1))
    for exps in itertools.product(*ranges):
        v = 1
        for b, a in zip(bases, exps):
            v *= b**a
        if v <= N:
            out.add(v)
    return sorted(out)


def brute_min_weights(bases, digits, N, max_support):
    """Minimal weight of every n <= N over supports of size <= max_support.

    Plain subset/digit enumeration; ``None`` where nothing is found.
    """
    pps = brute_power_products(bases, N)
    nz = [d for d in digits if d]
    best = [None] * (N + 1)
    best[0] = 0
    for k in range(1, max_support + 1):
        for support in itertools.combinations(pps, k):
            if sum(support) > N:
                continue
            for ds in itertools.product(nz, repeat=k):
                v = sum(d * b for d, b in zip(ds, support))
                if v <= N and best[v] is None:
                    best[v] = k
    return best


ACCEPTANCE_LINES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): an acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, label = marker.args
    status = "PASS" if call.excinfo is None else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number} {status} ({call.duration:.2f} s): {label}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
