import sys
from pathlib import Path

import pytest

from qgsurgeon.cli import fixtures_dir

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = fixtures_dir()
ALL_FIXTURES = sorted(p.stem for p in FIXTURES.glob("*.qgs"))


@pytest.fixture
def fixture_path():
    def get(name):
        suffix = "" if "." in name else ".qgs"
        return FIXTURES / f"{name}{suffix}"
    return get


@pytest.fixture
def fixture_text(fixture_path):
    return lambda name: fixture_path(name).read_text()


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n = marker.args[0]
    ok = call.excinfo is None and _CRITERIA.get(n, ("PASS",))[0] == "PASS"
    _CRITERIA[n] = ("PASS" if ok else "FAIL", item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, name = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {status}  ({name})")
