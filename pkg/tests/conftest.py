import numpy as np
import pytest

from imcf_torus import geometry as geo
from imcf_torus import scenarios as sc


@pytest.fixture(scope="session")
def torus512():
    return sc.make_round_torus(3.0, 1.0, 512)


@pytest.fixture(scope="session")
def torus_field(torus512):
    return geo.curvature_field(torus512)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_line():
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
