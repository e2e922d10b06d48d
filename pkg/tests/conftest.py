from __future__ import annotations

_SUMMARY: list[str] = []


def record_criterion(line: str) -> None:
    _SUMMARY.append(line)


def pytest_terminal_summary(terminalreporter):
    if _SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in _SUMMARY:
            terminalreporter.write_line(line)
