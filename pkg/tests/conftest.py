import numpy as np
import pytest

from spectral_bracket import Potential, make_plane_wave


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def zero_pot():
    return Potential.zero(np.pi)


@pytest.fixture(scope="session")
def one_gap():
    return make_plane_wave(0.5, 1, np.pi)


@pytest.fixture(scope="session")
def two_mode():
    # two open gaps in [-3, 3]
    return Potential(np.pi, [-2, 1], [0.3, 0.4j])


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def record():
    """Store the one-line outcome of an acceptance criterion."""
    def _record(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
