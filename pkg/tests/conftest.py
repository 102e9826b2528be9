import warnings

import pytest

from dqs import DriveParams, RelaxRates

# parameter points used throughout (gamma = 0.03, eta = 0, epsilon = 0.1)
FIG_POINTS = (5.0, 6.0, 8.6, 9.0, 12.0)


@pytest.fixture
def relax():
    return RelaxRates(0.03, 0.0)


def drive_at(a, epsilon=0.1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return DriveParams.from_strength(a, epsilon=epsilon)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
