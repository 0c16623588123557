from fractions import Fraction as F
from pathlib import Path

import pytest

from horolmmp.exact import LatticeBasis
from horolmmp.io import parse_input
from horolmmp.model import BStableDivisor, Color, GStable, SpaceData

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "horolmmp" / "fixtures"


def sl3_space(gstable=((("X1", (1,)), ("X2", (-1,))))):
    return SpaceData(2, [Color("alpha", (1, 0), 2), Color("beta", (0, 1), 2)],
                     LatticeBasis(2, ((1, 2),)), [GStable(n, x) for n, x in gstable],
                     ["varpi_alpha", "varpi_beta"])


def ex_space(extra=()):
    gs = [GStable("X1", (1, -1)), GStable("X2", (2, 1)), GStable("X3", (-1, 0))]
    gs += [GStable(n, x) for n, x in extra]
    return SpaceData(2, [Color("alpha", (1, 0), 2)], LatticeBasis.standard(2), gs, ["varpi_alpha", "varpi_0"])


def div(g, c=()):
    return BStableDivisor([F(x) for x in g], [F(x) for x in c])


SL3_D = div([1, 1], [4, 4])


def ex_D(b1, b2, b3):
    return div([b1, b2, b3], [0])


@pytest.fixture
def sl3():
    return sl3_space()


@pytest.fixture
def ex():
    return ex_space()


def fixture_path(name):
    return FIXTURES / f"{name}.json"


def load(name):
    return parse_input(fixture_path(name))


# ------------------------------------------------------ acceptance summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or rep.when == "teardown":
        return
    n, title = m.args
    ok = rep.passed if rep.when == "call" else not rep.failed
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and ok and not rep.skipped)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
