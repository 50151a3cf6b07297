from __future__ import annotations

import sys
from pathlib import Path

import pytest

from fewnomial.gale import gale_dual
from fewnomial.support import normalize, parse_instance

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def ex18_path() -> Path:
    return DATA / "ex18.json"


@pytest.fixture
def ex18(ex18_path):
    return parse_instance(ex18_path.read_text())


@pytest.fixture
def ex18_sys(ex18):
    return normalize(ex18)


@pytest.fixture
def ex18_gale(ex18_sys):
    return gale_dual(ex18_sys)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
