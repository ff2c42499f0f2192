import numpy as np
import pytest

from emoswarm import engine
from emoswarm.geometry import Domain

UNIT = Domain.from_size(1.0, 1.0)


@pytest.fixture
def unit():
    return UNIT


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class _RunCache:
    """Default-preset runs, simulated once per session on first use."""

    def __init__(self):
        self._logs = {}

    def __call__(self, emotion, n=15, seed=0, duration=None):
        duration = duration or engine.DEFAULT_DURATION[emotion]
        key = (emotion, n, seed, duration)
        if key not in self._logs:
            spec = engine.default_spec(emotion, UNIT)
            self._logs[key] = engine.run(spec, n, UNIT, duration, engine.DEFAULT_DT, seed)
        return self._logs[key]


@pytest.fixture(scope="session")
def default_run():
    return _RunCache()


# Acceptance results, filled by tests/test_acceptance.py and reported at the end.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
