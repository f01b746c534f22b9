import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; returns the flag so tests can assert on it."""
    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        ok = bool(ok)
        _VERDICTS.append((number, title, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_VERDICTS, key=lambda v: v[0]):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
