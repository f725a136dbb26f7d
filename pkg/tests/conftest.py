from __future__ import annotations

import re

import pytest

from crowpair.model import RingGeometry, WaveguideParams

_ACCEPTANCE: dict[int, tuple[str, str]] = {}
_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")


@pytest.fixture(scope="session")
def wg() -> WaveguideParams:
    return WaveguideParams()


@pytest.fixture(scope="session")
def geom() -> RingGeometry:
    return RingGeometry()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None or "test_acceptance" not in report.nodeid:
        return
    idx = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else "FAIL"
        if _ACCEPTANCE.get(idx, ("PASS",))[0] == "FAIL":
            status = "FAIL"  # a parametrized criterion passes only if every case passes
        _ACCEPTANCE[idx] = (status, m.group(2))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for idx in sorted(_ACCEPTANCE):
        status, name = _ACCEPTANCE[idx]
        terminalreporter.write_line(f"criterion {idx:2d}  {status}  {name}")
