import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, passed, detail):
        _LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
