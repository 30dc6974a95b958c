"""Shared test plumbing: collects acceptance-criterion verdicts and prints
them as one PASS/FAIL line each at the end of the session."""

import pytest

_verdicts: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record a labelled acceptance verdict, then assert it."""

    def check(label: str, ok, detail: str) -> None:
        _verdicts.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _verdicts:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[acceptance] {label}: {status} ({detail})")
