import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from infocontract import make_belief, make_distribution

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def random_interior_belief(rng, n, floor=0.02):
    p = rng.dirichlet(np.ones(n))
    return make_belief(p * (1 - n * floor) + floor)


def random_distribution(rng, n, m=None, floor=0.03):
    """Random Bayes-plausible distribution: prior is a random mix of the support."""
    m = m or n
    support = [random_interior_belief(rng, n, floor) for _ in range(m)]
    w = rng.dirichlet(np.ones(m)) * 0.8 + 0.2 / m
    prior = make_belief(w @ np.vstack([b.probs for b in support]))
    return make_distribution(support, None, prior)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
