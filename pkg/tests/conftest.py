import pytest

from invdet.numberfield import catalog_lookup
from invdet.qoalgebra import algebra_lookup

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def gaussian():
    return catalog_lookup("GAUSSIAN")


@pytest.fixture(scope="session")
def qsqrt5():
    return catalog_lookup("REAL_QUADRATIC_5")


@pytest.fixture(scope="session")
def zeta5():
    return catalog_lookup("CYCLOTOMIC_5")


@pytest.fixture(scope="session")
def hamilton():
    return algebra_lookup("HAMILTON_SQRT5")


@pytest.fixture(scope="session")
def alamouti():
    return algebra_lookup("ALAMOUTI")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
