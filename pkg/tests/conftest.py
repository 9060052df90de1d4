import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from grwcurv.chartgeo import product_of_spheres  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(scope="session")
def s2xs2():
    return product_of_spheres(2, 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(f"CRITERION {k}: {results[k]}")
