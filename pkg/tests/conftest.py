import numpy as np
import pytest
from hypothesis import settings

from cvfeedback import OptimizerConfig, valid_lambda_interval

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def valid_triples() -> list[tuple[float, float, float]]:
    """550 stable, physical (chi, eta, lam) points.

    Gains are spread over each connected physical window, stopping 0.05
    short of the stability pole so covariance entries stay O(10).
    """
    out = []
    for chi in np.round(np.arange(0.0, 0.46, 0.05), 2):
        for eta in (0.3, 0.5, 0.7, 0.99, 1.0):
            lo, hi = valid_lambda_interval(float(chi), eta)
            hi = min(hi, (0.5 + chi) / 2.0 - 0.05)
            for lam in np.linspace(lo, hi, 11):
                out.append((float(chi), eta, float(lam)))
    return out


@pytest.fixture(scope="session")
def triples():
    return valid_triples()


@pytest.fixture(scope="session")
def opt_cfg():
    return OptimizerConfig()
