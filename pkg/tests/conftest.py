import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(id, ok, detail)."""

    def record(cid: str, ok: bool, detail: str) -> bool:
        _CRITERIA.append(f"{'PASS' if ok else 'FAIL'}  {cid}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
