import numpy as np
import pytest

from cesaro_lab.core import TaylorSeries


def random_series(rng, degree, decay=1.0):
    """Complex Gaussian coefficients, optionally damped by decay**n."""
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return TaylorSeries(c * decay ** np.arange(degree + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# one line per acceptance criterion, printed after the run
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok, title = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}")
