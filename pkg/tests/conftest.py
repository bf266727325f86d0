import pytest

_VERDICTS: list[str] = []


class Criterion:
    """Records one acceptance verdict line and fails the test if it is negative."""

    def __init__(self, name: str):
        self.name = name

    def __call__(self, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {self.name}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, line


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("acceptance")
    return Criterion(marker.args[0] if marker and marker.args else request.node.name)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
