import pytest

from dopplercloak.cloak import Scenario


@pytest.fixture(scope="session")
def scenario():
    """Cart at -0.03 m/s with the 330-degree coating, noiseless."""
    sc = Scenario()
    sc.calibration  # fit surface and calibrate once
    return sc


@pytest.fixture(scope="session")
def calibration(scenario):
    return scenario.calibration


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def record(number, name, ok, detail):
        _ACCEPTANCE.append((number, name, bool(ok), detail))
        assert ok, f"criterion {number} ({name}): {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}")
