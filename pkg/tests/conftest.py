import pytest

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome and assert it."""

    def _record(cid: str, ok: bool, detail: str = ""):
        _criteria.append((cid, bool(ok), detail))
        assert ok, f"{cid} failed: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for cid, ok, detail in _criteria:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {cid}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
