"""Shared pytest plumbing: collects acceptance verdict lines and echoes
them in a terminal section after the run, so they survive output capture."""

from __future__ import annotations

_verdicts: list[str] = []


def record_verdict(line: str) -> None:
    _verdicts.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _verdicts:
        terminalreporter.section("acceptance gate")
        for line in _verdicts:
            terminalreporter.write_line(line)
