import numpy as np
import pytest

SEED = 20240917

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng(request):
    # one stream per test, derived from the test name so runs are reproducible
    seed = (SEED + sum(map(ord, request.node.name))) % 2**32
    request.node.user_properties.append(("seed", seed))
    return np.random.default_rng(seed)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
