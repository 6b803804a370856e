import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from widthlab.surface import SPHERE, EllipsoidParams

settings.register_profile(
    "widthlab", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("widthlab")

NEAR_ROUND = EllipsoidParams(0.95, 1.0, 1.05)


@pytest.fixture
def near_round():
    return NEAR_ROUND


@pytest.fixture
def sphere():
    return SPHERE


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
