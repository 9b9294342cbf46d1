import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ssflab import fixtures, suspension

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def scalar_pair():
    """FIX-SCALAR suspension at the production grid (T=12, N=801)."""
    return suspension.assemble(
        suspension.TimeGrid(12.0, 801), fixtures.fixture_path("FIX-SCALAR")
    )


@pytest.fixture(scope="session")
def scalar_pair_fine():
    return suspension.assemble(
        suspension.TimeGrid(12.0, 1601), fixtures.fixture_path("FIX-SCALAR")
    )


@pytest.fixture(scope="session")
def diag2_pair():
    return suspension.assemble(
        suspension.TimeGrid(12.0, 801), fixtures.fixture_path("FIX-DIAG2")
    )


@pytest.fixture(scope="session")
def halfcross_pair():
    """Singular-endpoint fixture on the doubled axis."""
    return suspension.assemble(
        suspension.TimeGrid(24.0, 1601), fixtures.fixture_path("FIX-HALFCROSS")
    )
