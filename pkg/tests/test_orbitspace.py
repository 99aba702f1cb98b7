import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge_lab.fuchsian import ConstructionRejected, build_fuchsian
from lozenge_lab.limitset import gap_image
from lozenge_lab.orbitspace import Conjugacy, build_orbit_space
from lozenge_lab.presentation import OrbifoldSignature, random_word

unit = st.floats(0, 1, allow_nan=False, exclude_max=True)


def test_geodesic_model_is_the_standard_strip(spaces):
    S = spaces["geodesic"]
    x = np.random.default_rng(0).uniform(0, 1, 500)
    assert np.max(np.abs(S.alpha1(x) - x)) < 1e-12
    assert np.max(np.abs(S.beta1(x) - x - 1.0)) < 1e-12
    assert np.max(np.abs(S.phi1(x) - x)) < 1e-12
    assert np.max(np.abs(S.phi2(x) - x)) < 1e-12


def test_geodesic_model_for_double_cover(four_holed):
    S = build_orbit_space(four_holed, seed=0)
    x = np.random.default_rng(1).uniform(0, 1, 200)
    assert np.max(np.abs(S.alpha1(x) - x)) < 1e-12
    assert np.max(np.abs(S.beta1(x) - x - 0.5)) < 1e-9
    assert {c.boundary: c.elementary_count() for c in S.chains()} == {1: 4, 2: 4, 3: 4, 4: 4}


def test_rejections(pants):
    rep, _ = build_fuchsian(OrbifoldSignature(1, False, (), 2, 1))
    with pytest.raises(ConstructionRejected) as e:
        build_orbit_space(rep)
    assert e.value.module == "orbitspace"
    bare, _ = build_fuchsian(OrbifoldSignature(0, True, (), 3, 1))
    with pytest.raises(ConstructionRejected):
        build_orbit_space(bare)


def test_alpha_on_blown_gap(spaces, pants):
    S = spaces["da-split"]
    g = pants.gap_representatives[(1, 0)]
    a, b = g.lo, g.hi
    L = b - a
    d = a + 0.3 * L                  # first interior fixed point of rho_1
    assert np.allclose(S.alpha1(np.array([a + 0.5 * L, a + 0.9 * L])), b)
    inner = S.alpha1(np.linspace(a + 0.01 * L, d - 0.01 * L, 20))
    assert np.all((inner > a) & (inner < b)) and np.all(np.diff(inner) > 0)
    # untouched orbits keep alpha_1 = id
    g2 = pants.gap_representatives[(2, 0)]
    mid = 0.5 * (g2.lo + g2.hi)
    assert abs(S.alpha1(mid)[0] - mid) < 1e-12


@settings(max_examples=40, deadline=None)
@given(unit, unit, st.sampled_from(["da-split", "double-blow"]))
def test_boundary_maps_are_monotone_and_separated(spaces, x, y, name):
    S = spaces[name]
    lo, hi = min(x, y), max(x, y)
    A = S.alpha1(np.array([lo, hi]))
    B = S.beta1(np.array([lo, hi]))
    assert A[0] <= A[1] + 1e-12 and B[0] <= B[1] + 1e-12
    assert np.all(np.array([lo, hi]) <= A + 1e-12)
    assert np.all(A < B)
    assert np.all(B <= np.array([lo, hi]) + 1.0 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(unit, st.integers(-2, 2))
def test_boundary_maps_commute_with_h(spaces, x, n):
    S = spaces["double-blow"]
    assert abs(S.alpha1(x + n)[0] - S.alpha1(x)[0] - n) < 1e-9
    assert abs(S.beta1(x + n)[0] - S.beta1(x)[0] - n) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_alpha_equivariance(spaces, seed):
    S = spaces["double-blow"]
    rng = np.random.default_rng(seed)
    w = random_word(S.rho0.pres, int(rng.integers(1, 4)), rng)
    x = rng.uniform(0, 1, 20)
    lhs = S.alpha1(S.rho1.evaluate(w, x))
    rhs = S.rho2.evaluate(w, S.alpha1(x))
    assert np.max(np.abs(lhs - rhs)) < 1e-7
    lhs = S.phi1(S.rho1.evaluate(w, x))
    rhs = S.rho0.evaluate(w, S.phi1(x))
    assert np.max(np.abs(lhs - rhs)) < 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_plane_action_preserves_omega(spaces, seed):
    S = spaces["double-blow"]
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, 30)
    A, B = S.alpha1(x), S.beta1(x)
    y = A + rng.uniform(0.05, 0.95, 30) * (B - A)
    w = random_word(S.rho0.pres, int(rng.integers(1, 4)), rng)
    x2, y2 = S.act_plane(w, x, y)
    assert S.in_omega(x2, y2).all()


def test_chi_lands_in_geodesic_strip(spaces):
    S = spaces["double-blow"]
    rng = np.random.default_rng(5)
    x = rng.uniform(0, 1, 400)
    A, B = S.alpha1(x), S.beta1(x)
    y = A + rng.uniform(0.01, 0.99, 400) * (B - A)
    u, v = S.chi(x, y)
    assert np.all((u <= v) & (v <= u + 1.0))


@pytest.mark.parametrize("name, counts", [
    ("geodesic", {1: 2, 2: 2, 3: 2}),
    ("da-split", {1: 4, 2: 2, 3: 2}),
    ("double-blow", {1: 4, 2: 4, 3: 2}),
])
def test_chain_counts(spaces, name, counts):
    chains = spaces[name].chains()
    assert {c.boundary: c.elementary_count() for c in chains} == counts
    for c in chains:
        assert [l.label for l in c.lozenges] == ["exit", "entrance"]


def test_split_lozenge_corners(spaces, pants):
    ch = spaces["da-split"].chain(1)
    ex = ch.lozenges[0]
    assert len(ex.elementary) == 3
    # adjacent elementary lozenges share a vertical side, with alternating corner pairs
    for e0, e1 in zip(ex.elementary, ex.elementary[1:]):
        assert e0[0][1] == e1[0][0]
    assert len(ch.fake_corners()) == 2
    assert len(ch.true_corners()) == 3
    g = pants.gap_representatives[(1, 0)]
    assert ex.x == (g.lo, g.hi)


def test_core_membership(spaces, pants):
    S = spaces["da-split"]
    g = pants.gap_representatives[(1, 0)]
    a, b = g.lo, g.hi
    mid = 0.5 * (a + b)
    v, corners = S.core_membership(np.array([mid, mid, mid]), np.array([mid + 0.1 * (b - a), a + 1 + 0.5 * (b - a), mid + 0.5]))
    assert v[0] == "triangle" and corners[0] == (a, b)
    assert v[1] == "triangle" and corners[1] == (b, a + 1)
    assert v[2] in ("core", "outside")


def test_conjugacy_roundtrip(pants):
    g = pants.gap_representatives[(1, 0)]
    f = pants.map(g.stabilizer)
    a, b = g.lo, g.hi
    H = Conjugacy(f, f, (a, b), (a, b), a + 0.4 * (b - a), a + 0.6 * (b - a))
    x = np.linspace(a, b, 50)[1:-1]
    assert np.max(np.abs(H.inv(H(x)) - x)) < 1e-9
    assert np.max(np.abs(H(f(x)) - f(H(x)))) < 1e-9
    assert np.all(np.diff(H(x)) > 0)


def test_to_json(spaces):
    for S in spaces.values():
        json.dumps(S.to_json())
        json.dumps([c.to_json() for c in S.chains()])


def test_gap_locator_consistency(spaces):
    S = spaces["da-split"]
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 1, 200)
    found, res = S.locate(x)
    for xi, f, r in zip(x, found, res):
        if f:
            lo, hi = gap_image(S.rho0, r[1], S.reps[r[0]])
            assert lo < xi < hi


def test_cross_orbit_blow_ups_for_double_cover(four_holed):
    # for k = 2 the tau-preceding gap of orbit (i, m) lies in (i, m - 1), so blow-ups on
    # neighbouring orbits constrain each other's semiconjugacies
    from lozenge_lab.blowup import hyperbolic_blow_up
    from lozenge_lab.verify import check_semiconjugacies

    from conftest import DA_SPEC
    r1 = hyperbolic_blow_up(four_holed, [((1, 0), DA_SPEC), ((3, 1), DA_SPEC)])
    r2 = hyperbolic_blow_up(four_holed, [((1, 1), DA_SPEC)])
    S = build_orbit_space(four_holed, r1, r2, seed=3)
    r = check_semiconjugacies(S, n=200, n_words=8, n_omega=2000)
    assert r.passed, r.details
    # rho_2 is unmodified on (3, 1), so phi_2 is the identity there
    g = four_holed.gap_representatives[(3, 1)]
    z = np.linspace(g.lo, g.hi, 50)[1:-1]
    assert np.max(np.abs(S.phi2(z) - z)) < 1e-12
