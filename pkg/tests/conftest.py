from __future__ import annotations

import pytest

from _report import RESULTS
from twistcodes import codes, gf
from twistcodes.ratfun import Poly
from twistcodes.twist import TwistAut

@pytest.fixture(scope="session")
def base27() -> gf.FieldTower:
    """F_3 < F_27 with a^3 - a + 1 = 0, no top level."""
    return gf.example_tower(with_top=False)


@pytest.fixture(scope="session")
def phi27(base27) -> TwistAut:
    return TwistAut(base27, base27.fqm(-1))


@pytest.fixture(scope="session")
def example_points(base27):
    F = base27.fqm
    a, x = F.gen, Poly.x(F)
    return [1, a, a**2, x, a * x, a**2 * x]


@pytest.fixture(scope="session")
def example_G(phi27, example_points) -> codes.GenMatrix:
    return codes.construct_mrd(phi27, example_points, 3)


@pytest.fixture(scope="session")
def quartic(base27) -> Poly:
    return Poly(base27.fqm, gf.EXAMPLE_QUARTIC)


@pytest.fixture(scope="session")
def example_Gbar(example_G, quartic) -> codes.GenMatrix:
    return codes.reduce_code(example_G, quartic)


@pytest.fixture(scope="session")
def example_cert(example_Gbar) -> codes.Certificate:
    return codes.certify_mrd(example_Gbar, workers=1)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
