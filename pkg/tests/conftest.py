import contextlib

import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion's outcome."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        notes: list[str] = []
        try:
            yield notes
        except BaseException:
            _ACCEPTANCE[number] = (title, False, "; ".join(notes))
            raise
        _ACCEPTANCE[number] = (title, True, "; ".join(notes))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, notes = _ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(line + (f" ({notes})" if notes else ""))
