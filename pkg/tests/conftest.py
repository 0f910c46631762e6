import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hedonic_eq import MarketInstance

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SQ3 = np.sqrt(3.0)


@pytest.fixture
def ex1():
    """Two firms, alpha = 1, beta = (0, 1), gamma = (2, sqrt 3)."""
    return MarketInstance(1.0, [0.0, 1.0], [2.0, SQ3])


def unit(rng, m):
    v = rng.normal(size=m)
    return v / np.linalg.norm(v)


def random_instance(rng, n=None, m=None, alpha=None):
    """Instances spread across all planner and equilibrium regimes."""
    n = int(rng.integers(2, 7)) if n is None else n
    m = int(rng.integers(2, 5)) if m is None else m
    a = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0)))) if alpha is None else alpha
    scale = np.exp(rng.uniform(np.log(0.05), np.log(20.0)))
    g = scale * rng.uniform(0.05, 1.0, size=n)
    if rng.uniform() < 0.2:
        g[rng.integers(n)] *= rng.uniform(2.0, 10.0)
    return MarketInstance(a, unit(rng, m), g)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
