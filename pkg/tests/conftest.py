import sys
from pathlib import Path

import pytest

from effekta import library as L
from effekta.config import preset
from effekta.effects import compile_effect
from effekta.parser import parse_effect, parse_expr

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def cfgs():
    return {m: preset(m) for m in ("exception", "list", "distribution", "output")}


def expr(src, monad="output"):
    """Parse against the preset signatures of ``monad``."""
    return parse_expr(src, preset(monad).signatures)


def eff(src):
    return compile_effect(parse_effect(src))


def app(name, n):
    return f"{L.FUNCTIONS[name]} {n}"


# ---- one summary line per acceptance criterion

_criteria: dict[int, list] = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    n, title = marker
    entry = _criteria.setdefault(n, [title, True])
    if report.failed:
        entry[1] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
