import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bubblechaos import PhysicalParams, nondimensionalize

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def dp_at(d_over_r0=20.0, p_ac=1.2e6, **kw):
    return nondimensionalize(PhysicalParams(**kw).at(d_over_r0, p_ac))


@pytest.fixture
def dp():
    return dp_at()


@pytest.fixture
def dp_rest():
    return dp_at(p_ac=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_report():
    """Record one pass/fail line per acceptance criterion."""
    def report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
