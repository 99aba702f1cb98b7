import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge_lab.blowup import (ProfileError, blow_down, gap_fixed_points, hyperbolic_blow_up,
                                make_blow_profile, modify_on_gap)
from lozenge_lab.circlemap import check_alternation
from lozenge_lab.fuchsian import ConstructionRejected
from lozenge_lab.limitset import compute_minimal_set, sample_limit_points

from conftest import DA_SPEC


@pytest.mark.parametrize("spec, msg", [
    ([(0.5, 0.5)], "even"),
    ([(0.3, 2.0), (0.7, 0.5)], "alternate"),
    ([(0.7, 0.5), (0.3, 2.0)], "increasing"),
    ([(0.3, 1.0), (0.7, 2.0)], "neutral"),
    ([(0.3, -1.0), (0.7, 2.0)], "positive"),
])
def test_profile_validation(pants, spec, msg):
    with pytest.raises(ProfileError, match=msg):
        make_blow_profile(pants, pants.gap_representatives[(1, 0)], spec)


def test_profile_shape(pants):
    g = pants.gap_representatives[(1, 0)]
    prof = make_blow_profile(pants, g, DA_SPEC)
    L = g.hi - g.lo
    want = [g.lo + 0.3 * L, g.lo + 0.7 * L]
    for (x, m), w, mult in zip(prof.interior, want, (0.5, 2.0)):
        assert abs(x - w) < 1e-12
        assert abs(prof(x) - x) < 1e-12
        h = 0.1 * prof.delta
        assert abs((prof(x + h) - prof(x - h)) / (2 * h) - mult) < 1e-9
    x = np.linspace(g.lo, g.hi, 200)
    assert np.all(np.diff(prof(x)) > 0)
    assert np.allclose(prof.inv(prof(x)), x)
    # collars agree with the stabilizer, so endpoints stay fixed
    gamma = pants.map(g.stabilizer)
    assert np.allclose(prof(np.array([g.lo, g.hi])), gamma(np.array([g.lo, g.hi])))


def test_blown_gap_fixed_points(pants_blown):
    r1, _ = pants_blown
    g = r1.gap_representatives[(1, 0)]
    recs = gap_fixed_points(r1, g)
    assert len(recs) == 4
    assert [r.type for r in recs] == ["repelling", "attracting", "repelling", "attracting"]
    L = g.hi - g.lo
    assert abs(recs[1].location - (g.lo + 0.3 * L)) < 1e-9
    assert abs(recs[2].location - (g.lo + 0.7 * L)) < 1e-9


def test_other_orbits_untouched(pants, pants_blown):
    r1, _ = pants_blown
    for oid in [(2, 0), (3, 0)]:
        g = pants.gap_representatives[oid]
        assert len(gap_fixed_points(r1, g)) == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000))
def test_agrees_off_gap_orbit(pants, pants_blown, seed):
    r1, r2 = pants_blown
    pts = sample_limit_points(pants, 50, np.random.default_rng(seed))
    for r in (r1, r2):
        for g in pants.pres.generators:
            for e in (1, -1):
                assert np.max(np.abs(r.evaluate(((g, e),), pts) - pants.evaluate(((g, e),), pts))) < 1e-10


def test_blow_down_restores_two_fixed_points(pants_blown):
    r1, _ = pants_blown
    down = blow_down(r1, (1, 0))
    g = down.gap_representatives[(1, 0)]
    recs = gap_fixed_points(down, g)
    assert len(recs) == 2 and check_alternation(recs)
    assert (1, 0) not in down.blown


def test_blow_up_keeps_cover(pants, pants_blown):
    c0 = compute_minimal_set(pants, 5).cover
    for r in pants_blown:
        assert np.max(np.abs(compute_minimal_set(r, 5).cover - c0)) < 1e-9


def test_plan_rejections(pants):
    with pytest.raises(ConstructionRejected):
        hyperbolic_blow_up(pants, [((1, 0), DA_SPEC), ((1, 0), DA_SPEC)])
    with pytest.raises(ConstructionRejected):
        hyperbolic_blow_up(pants, [((7, 0), DA_SPEC)])


def test_two_orbits_in_one_plan(pants):
    r = hyperbolic_blow_up(pants, [((1, 0), DA_SPEC), ((2, 0), [(0.2, 0.4), (0.4, 3.0), (0.6, 0.5), (0.8, 2.0)])])
    assert len(gap_fixed_points(r, pants.gap_representatives[(1, 0)])) == 4
    assert len(gap_fixed_points(r, pants.gap_representatives[(2, 0)])) == 6
    assert len(gap_fixed_points(r, pants.gap_representatives[(3, 0)])) == 2


def test_conjugate_gap_is_transported(pants):
    # a conjugate gap of the same orbit gives the same blown orbit
    g = next(x for x in pants.gap_table if x.orbit_id == (1, 0) and x.address)
    prof = make_blow_profile(pants, g, DA_SPEC)
    r, rec = modify_on_gap(pants, g, prof)
    assert rec.orbit == (1, 0)
    assert len(gap_fixed_points(r, g)) == 4
    assert len(gap_fixed_points(r, pants.gap_representatives[(1, 0)])) == 4
