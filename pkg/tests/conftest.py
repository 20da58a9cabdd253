import numpy as np
import pytest

from qsm import analysis, zoo

ERGODIC_ZOO = [
    "biased_coin{0.3}",
    "golden_mean{0.5}",
    "even_process{0.5}",
    *(f"renewal{{{N}}}" for N in range(2, 11)),
]
ALL_ZOO = ERGODIC_ZOO[:3] + ["alternating{}"] + ERGODIC_ZOO[3:]

_RESULTS = []


def record(criterion, ok, detail):
    """Register one acceptance line; printed in the terminal summary."""
    _RESULTS.append((criterion, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


@pytest.fixture(scope="session")
def analyses():
    """Cached end-to-end analyses; the period-2 machine runs non-strict."""
    cache = {}

    def get(name):
        if name not in cache:
            m = zoo.from_shorthand(name)
            cache[name] = analysis.run(m, strict=(name != "alternating{}"))
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
