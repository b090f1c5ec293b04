"""Shared, expensive fixtures computed once per session."""

import pytest

from twsolve.homoclinic import find_homoclinic, homoclinic_branches


@pytest.fixture(scope="session")
def homoclinic_result():
    return find_homoclinic(A=1.0, bracket=(-0.9, -0.8))


@pytest.fixture(scope="session")
def reference_branches(homoclinic_result):
    """Stable/unstable manifold halves at mu*, integrated at tolerance 1e-12."""
    return homoclinic_branches(1.0, homoclinic_result.mu_star, tol=1e-12)


# acceptance report -----------------------------------------------------------

ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, text):
    """Store (and print) the one-line verdict of an acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {text}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
