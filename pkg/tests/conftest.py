import pytest

from semislant.diffgeo import FDConfig
from semislant.submersion import clear_caches

CRITERIA: dict[int, str] = {}


def record(number: int, ok: bool, summary: str) -> None:
    """Keep one verdict line per acceptance criterion and echo it."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {summary}"
    CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])


@pytest.fixture
def cfg():
    return FDConfig()


@pytest.fixture(autouse=True, scope="module")
def _fresh_caches():
    clear_caches()
    yield
