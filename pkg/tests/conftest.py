import pytest

_LINES: list[str] = []


class _Recorder:
    def __call__(self, name: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def criterion():
    """Record one acceptance line; the caller still asserts on the result."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
