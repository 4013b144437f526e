import pytest

from ckverify.calabi import BaseGeometry, build_calabi_chart
from ckverify.profiles import MomentumProfile
from ckverify.solutions import calabi_pair, cone_pair


@pytest.fixture(scope="session")
def flat_calabi():
    return build_calabi_chart(BaseGeometry("flat", 2, 0.0), MomentumProfile(3, 1.0, 0.0), 1.0, 2.0)


@pytest.fixture(scope="session")
def fs_calabi():
    return build_calabi_chart(BaseGeometry("fs", 2, 1.0), MomentumProfile(3, 1.0, 1.0), 1.0, 2.0)


@pytest.fixture(scope="session")
def flat_calabi_pair(flat_calabi):
    return calabi_pair(flat_calabi)


@pytest.fixture(scope="session")
def fs_calabi_pair(fs_calabi):
    return calabi_pair(fs_calabi)


@pytest.fixture(scope="session")
def cone3():
    return cone_pair(3)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
