import pytest

from hawkmass import solve_warp_factor

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    """Always show one verdict line per acceptance criterion."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def w05():
    """Workhorse profile: a = 0.5 solved over two periods."""
    return solve_warp_factor(0.5, 13.0)


@pytest.fixture(scope="session")
def w08():
    return solve_warp_factor(0.8, 13.0)


@pytest.fixture(scope="session")
def warp_family():
    """Profiles for the sweep over minimum radii."""
    return {a: solve_warp_factor(a, 13.0) for a in (0.3, 0.5, 0.7, 0.9)}
