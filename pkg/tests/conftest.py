import pytest

from lozenge_lab.presentation import OrbifoldSignature
from lozenge_lab.fuchsian import build_fuchsian
from lozenge_lab.limitset import compute_minimal_set
from lozenge_lab.blowup import attach_gaps, hyperbolic_blow_up
from lozenge_lab.orbitspace import build_orbit_space

PANTS = OrbifoldSignature(0, True, (), 3, 1)
DA_SPEC = [(0.3, 0.5), (0.7, 2.0)]

_criteria = {}          # title -> list of (passed, expected failure)


def _build(sig, depth=4):
    rep, cert = build_fuchsian(sig)
    attach_gaps(rep, compute_minimal_set(rep, depth))
    return rep, cert


@pytest.fixture(scope="session")
def pants():
    """Unmodified pants representation with its gap table attached."""
    return _build(PANTS)[0]


@pytest.fixture(scope="session")
def pants_blown(pants):
    """(rho1, rho2): rho1 blown on orbit (1, 0), rho2 on orbit (2, 0)."""
    return (hyperbolic_blow_up(pants, [((1, 0), DA_SPEC)]),
            hyperbolic_blow_up(pants, [((2, 0), DA_SPEC)]))


@pytest.fixture(scope="session")
def spaces(pants, pants_blown):
    r1, r2 = pants_blown
    return {"geodesic": build_orbit_space(pants, seed=0),
            "da-split": build_orbit_space(pants, r1, pants, seed=0),
            "double-blow": build_orbit_space(pants, r1, r2, seed=0)}


@pytest.fixture(scope="session")
def four_holed():
    """Four-holed sphere in the 2-fold cover (k divides the Euler characteristic)."""
    return _build(OrbifoldSignature(0, True, (), 4, 2))[0]


@pytest.fixture
def criterion(record_property):
    def mark(n, title):
        record_property("criterion", f"{n:>2}. {title}")
    return mark


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _criteria.setdefault(value, []).append((report.outcome == "passed", hasattr(report, "wasxfail")))


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for title, runs in sorted(_criteria.items()):
            ok = all(p for p, _ in runs)
            note = " (expected failure, see decisions ledger)" if any(x for _, x in runs) else ""
            terminalreporter.write_line(f"criterion {title}: {'PASS' if ok else 'FAIL'}{note}")
