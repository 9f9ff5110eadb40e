from __future__ import annotations

import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record():
    """record(n, ok, text) stores the one-line verdict for acceptance criterion n."""

    def _record(n: int, ok: bool, text: str) -> None:
        ACCEPTANCE[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
