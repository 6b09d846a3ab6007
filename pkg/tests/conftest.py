import pytest

ACCEPTANCE_LINES: list[str] = []


class Recorder:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.line = None

    def check(self, ok: bool, detail: str) -> None:
        self.line = f"{'PASS' if ok else 'FAIL'} criterion {self.number} ({self.title}): {detail}"
        print(self.line)
        ACCEPTANCE_LINES.append(self.line)
        assert ok, self.line


@pytest.fixture
def criterion(request):
    """``criterion(n, title)`` returns a recorder whose ``check`` prints one PASS/FAIL line."""
    made = []

    def make(number: int, title: str) -> Recorder:
        made.append(Recorder(number, title))
        return made[-1]

    yield make
    for r in made:
        if r.line is None:
            line = f"FAIL criterion {r.number} ({r.title}): raised before the check"
            print(line)
            ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
