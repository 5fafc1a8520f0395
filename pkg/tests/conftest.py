"""Shared fixtures plus the acceptance-criteria reporter.

Acceptance tests record one line per criterion; the lines are printed in the
terminal summary so every run shows an explicit pass/fail verdict even when
pytest captures stdout.
"""

import numpy as np
import pytest

from pickdrop.stream import StreamView

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record a criterion verdict and assert it."""

    def check(number: int, name: str, ok: bool, detail: str = "") -> None:
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {number} ({name}): {verdict}"
        if detail:
            line += f" — {detail}"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def small_view():
    return StreamView(items=np.array([1, 1, 1, 2, 2, 3], dtype=np.uint32), n=3)
