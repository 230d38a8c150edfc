import pytest

from stridecue.noise import NoiseKind, NoiseParams, generate

N = 5000
MU = 1.15
SIGMA = 0.02
SEEDS = range(10)


@pytest.fixture(scope="session")
def pink_batch():
    return [generate(NoiseParams(NoiseKind.PINK, N, MU, SIGMA, seed)) for seed in SEEDS]


@pytest.fixture(scope="session")
def white_batch():
    return [generate(NoiseParams(NoiseKind.WHITE, N, MU, SIGMA, seed)) for seed in SEEDS]


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        label = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
        _acceptance.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_acceptance):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")
