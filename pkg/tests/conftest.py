import random

import pytest
from hypothesis import HealthCheck, settings

from geography4.exterior import BasisChange

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_unimodular(n, rng, steps=None, det=1):
    """Product of random elementary operations; determinant is `det`."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps or 3 * n):
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-2, 2)
        for c in range(n):
            m[i][c] += q * m[j][c]
        if rng.random() < 0.3:
            m[i], m[j] = m[j], m[i]
            m[i] = [-x for x in m[i]]
    if det == -1:
        m[0] = [-x for x in m[0]]
    return BasisChange(m)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
