import math
import sys

import numpy as np
import pytest

from ordered_pd.cone import PDMatrix


def scalar(v):
    return PDMatrix([[v]])


E = math.e


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_pd(rng, dim):
    g = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return PDMatrix(g @ g.T + 0.1 * np.eye(dim))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
