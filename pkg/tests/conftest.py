from __future__ import annotations

import pytest

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def write_tsv(tmp_path):
    def _write(name, rows, directory=None):
        d = directory or tmp_path
        d.mkdir(parents=True, exist_ok=True)
        path = d / name
        path.write_text("".join("\t".join(map(str, r)) + "\n" for r in rows), encoding="utf-8")
        return path

    return _write


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        detail = "; ".join(f"{k}={v}" for k, v in report.user_properties)
        status = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}  {detail}")
