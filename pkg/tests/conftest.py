import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ccdm.scheme import load_builtin_scheme  # noqa: E402

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(ident, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    ident, title = marker.args
    failed = call.excinfo is not None
    prev = _ACCEPTANCE.get(ident)
    if prev is None or prev[1] == "PASS":
        _ACCEPTANCE[ident] = (title, "FAIL" if failed else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for ident in sorted(_ACCEPTANCE, key=lambda s: int(s.lstrip("AC"))):
        title, verdict = _ACCEPTANCE[ident]
        terminalreporter.write_line(f"{ident:<5} {verdict}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240615)


@pytest.fixture(scope="session")
def table1_scheme():
    return load_builtin_scheme()
