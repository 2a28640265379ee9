import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slopegrowth import action
from slopegrowth.spectrum import Binning, spectrum_from_histogram

ACCEPTANCE_LINES: list[str] = []


def make_spectrum(spec, L, n_max=None, binning=None, **kw):
    hist = action.displacement_histogram(spec, L, dedup=not spec.injective)
    horizon = action.completeness_horizon(spec, L)
    return spectrum_from_histogram(
        hist, binning or Binning(), horizon if n_max is None else n_max,
        spec.fingerprint(), horizon=horizon, meta={"L_max": L}, **kw,
    )


@pytest.fixture(scope="session")
def ex31_12():
    return make_spectrum(action.example31(), 12)


@pytest.fixture(scope="session")
def ex41_11():
    return make_spectrum(action.example41(), 11)


@pytest.fixture(scope="session")
def ex51_hist_10():
    return action.displacement_histogram(action.example51(4), 10)


@pytest.fixture(scope="session")
def ex51_10(ex51_hist_10):
    spec = action.example51(4)
    return spectrum_from_histogram(ex51_hist_10, Binning(), 10, spec.fingerprint(), horizon=10, meta={"L_max": 10})


@pytest.fixture(scope="session")
def ex51_n5_8():
    return make_spectrum(action.example51(5), 8)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
