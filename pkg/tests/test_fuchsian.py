import numpy as np
import pytest

from lozenge_lab.circlemap import check_alternation, fixed_points
from lozenge_lab.fuchsian import ConstructionRejected, GeometryParams, build_fuchsian, twist, verify_certificate
from lozenge_lab.presentation import OrbifoldSignature
from lozenge_lab.verify import tau_orbits

SIGS = [OrbifoldSignature(0, True, (), 3, 1), OrbifoldSignature(1, True, (), 1, 1),
        OrbifoldSignature(0, True, (2, 3), 1, 1), OrbifoldSignature(1, False, (), 2, 1),
        OrbifoldSignature(0, True, (), 4, 2)]


@pytest.mark.parametrize("sig", SIGS, ids=str)
def test_certificate_and_relations(sig):
    rep, cert = build_fuchsian(sig)
    assert cert.ok
    ok, table = verify_certificate(rep, cert.arcs, sig.k)
    assert ok and all(t.get("ok", False) for t in table)
    # relators act as central translations
    for s in rep.relation_shifts():
        assert abs(s - round(s)) < 1e-9


@pytest.mark.parametrize("sig", SIGS, ids=str)
def test_boundary_letters_have_2k_fixed_points(sig):
    rep, _ = build_fuchsian(sig)
    for c in rep.pres.c:
        w = ((c, 1),)
        if rep.orientation(w) < 0:
            continue
        recs = fixed_points(rep.map(w))
        assert len(recs) == 2 * sig.k
        assert check_alternation(recs)
        for r in recs:
            assert abs(float(rep.evaluate(w, r.location)) - r.location) < 1e-9


def test_torsion_letters_have_finite_order():
    rep, _ = build_fuchsian(OrbifoldSignature(0, True, (2, 3), 1, 1))
    x = np.linspace(0, 1, 50)
    for d, a in rep.pres.torsion.items():
        y = rep.evaluate(((d, 1),) * a, x) - x
        assert np.max(np.abs(y - np.round(y))) < 1e-9
        assert fixed_points(rep.map(((d, 1),))) == []


def test_pants_double_cover_is_obstructed():
    # chi = -1 is odd, so the derived boundary letter has no lift with fixed points when k = 2
    with pytest.raises(ConstructionRejected) as e:
        build_fuchsian(OrbifoldSignature(0, True, (), 3, 2))
    assert e.value.module == "fuchsian"


def test_four_holed_double_cover_tau_orbits():
    rep, _ = build_fuchsian(OrbifoldSignature(0, True, (), 4, 2))
    for c in rep.pres.c:
        recs = fixed_points(rep.map(((c, 1),)))
        assert len(recs) == 4
        assert len(tau_orbits(recs, 2)) == 2


def test_twist_of_non_orientable():
    rep, _ = build_fuchsian(OrbifoldSignature(1, False, (), 2, 1))
    pair = twist(rep)
    x = np.linspace(0, 1, 17)
    k = rep.k
    assert np.allclose(pair.rho0star.evaluate((("a1", 1),), x), rep.evaluate((("a1", 1),), x) + 1 / k)
    assert np.allclose(pair.rho0star.evaluate((("c1", 1),), x), rep.evaluate((("c1", 1),), x))
    recs = fixed_points(rep.map((("a1", 1),)))
    assert len(recs) == 1 and recs[0].type == "reversing"


def test_bad_user_matrices_rejected():
    sig = OrbifoldSignature(0, True, (), 3, 1)
    geom = GeometryParams(matrices={"c1": np.eye(2) * 1.0, "c2": [[1.0, 0.1], [0.0, 1.0]]})
    with pytest.raises((ConstructionRejected, ValueError)):
        build_fuchsian(sig, geom)


def test_larger_lambda_keeps_certificate():
    sig = OrbifoldSignature(0, True, (), 3, 1)
    rep, cert = build_fuchsian(sig, GeometryParams(lam=6.0))
    assert cert.ok and rep.geometry.lam >= 6.0
