from pathlib import Path

import pytest

from memtranstor.config import RunConfig
from memtranstor.readout import ReadoutConfig

PROTOCOLS = Path(__file__).resolve().parents[1] / "src" / "memtranstor" / "protocols"


@pytest.fixture
def run_config() -> RunConfig:
    return RunConfig()


@pytest.fixture
def device(run_config):
    return run_config.build_device()


@pytest.fixture
def readout() -> ReadoutConfig:
    return ReadoutConfig()


@pytest.fixture
def protocols() -> Path:
    return PROTOCOLS


_CRITERIA: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, True])
    entry[1] = entry[1] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
