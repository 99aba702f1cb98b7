import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge_lab.fuchsian import build_fuchsian
from lozenge_lab.limitset import (GapLocator, check_dichotomy, compute_minimal_set, gap_image,
                                  representative_gaps, sample_limit_points, tau_restriction)
from lozenge_lab.presentation import OrbifoldSignature, random_word
from lozenge_lab.verify import _stab_residual


@pytest.fixture(scope="module")
def fresh():
    return build_fuchsian(OrbifoldSignature(0, True, (), 3, 1))[0]


def _inside(inner, outer, tol=1e-12):
    for lo, hi in inner:
        hit = [(a, b) for a, b in outer for s in (-1, 0, 1) if a + s - tol <= lo and hi <= b + s + tol]
        if not hit:
            return False
    return True


def test_covers_are_nested(fresh):
    covers = [compute_minimal_set(fresh, d).cover for d in range(5)]
    for d in range(4):
        assert _inside(covers[d + 1], covers[d])
    lengths = [float(np.sum(c[:, 1] - c[:, 0])) for c in covers]
    assert all(b < a for a, b in zip(lengths, lengths[1:]))


def test_piece_count_free_group(fresh):
    # 4 arcs, each piece has 3 children
    for d in range(4):
        assert len(compute_minimal_set(fresh, d).cover) == 4 * 3 ** d


def test_matrix_attractors_lie_in_cover(pants):
    # attracting eigendirections of random products are limit points (independent of the lifts)
    msa = compute_minimal_set(pants, 5)
    pts = sample_limit_points(pants, 300, np.random.default_rng(3))
    assert np.all(msa.membership(pts, eps=1e-9) >= 0)


def test_cover_is_invariant(pants):
    msa = compute_minimal_set(pants, 5)
    pts = sample_limit_points(pants, 100, np.random.default_rng(4))
    for g in pants.pres.generators:
        for e in (1, -1):
            y = pants.evaluate(((g, e),), pts)
            assert np.all(msa.membership(y, eps=1e-9) >= 0)


def test_tau_invariance_of_cover(four_holed):
    msa = compute_minimal_set(four_holed, 3)
    assert tau_restriction(msa).cover_residual() < 1e-9
    xs = np.linspace(0, 1, 20)
    for g in four_holed.pres.generators:
        assert tau_restriction(msa).equivariance_residual(four_holed, ((g, 1),), xs) < 1e-9


def test_representative_gaps(pants):
    reps = pants.gap_representatives
    assert sorted(reps) == [(1, 0), (2, 0), (3, 0)]
    msa = compute_minimal_set(pants, 5)
    for g in reps.values():
        mid = 0.5 * (g.lo + g.hi)
        assert msa.membership([mid])[0] == -1
        assert msa.membership([g.lo, g.hi], eps=1e-9).min() >= 0
        rec = pants.evaluate(g.stabilizer, np.array([g.lo + 1e-4, g.hi - 1e-4]))
        assert rec[0] > g.lo + 1e-4 and rec[1] > g.hi - 1e-4 - 1e-15   # pushes rightward


def test_gap_table_is_periodic_and_disjoint(pants):
    gaps = pants.gap_table
    assert len(gaps) > 20
    for g in gaps:
        assert _stab_residual(pants, g) < 1e-9
    los = np.array([g.lo for g in gaps])
    his = np.array([g.hi for g in gaps])
    assert np.all(his[:-1] <= los[1:])
    for g in gaps:
        ref = pants.gap_representatives[g.orbit_id]
        lo, hi = gap_image(pants, g.address, ref)
        assert abs(lo - g.lo) < 1e-9 and abs(hi - g.hi) < 1e-9


def test_gap_dichotomy(pants):
    assert check_dichotomy(pants, pants.gap_table) == []


def test_four_holed_has_two_gap_orbits_per_boundary(four_holed):
    assert sorted(four_holed.gap_representatives) == [(i, m) for i in range(1, 5) for m in range(2)]
    for (i, m), g in four_holed.gap_representatives.items():
        g0 = four_holed.gap_representatives[(i, 0)]
        d = g.lo - g0.lo - m / 2
        assert abs(d - round(d)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 0.95))
def test_locator_finds_gap_images(pants, seed, t):
    rng = np.random.default_rng(seed)
    reps = pants.gap_representatives
    oid = sorted(reps)[seed % len(reps)]
    w = random_word(pants.pres, int(rng.integers(0, 5)), rng)
    lo, hi = gap_image(pants, w, reps[oid])
    x = lo + t * (hi - lo)
    loc = GapLocator(pants, pants.certificate, pants.gap_table, reps)
    found, res = loc.locate([x])
    assert found[0]
    o2, w2 = res[0]
    lo2, hi2 = gap_image(pants, w2, reps[o2])
    assert lo2 < x < hi2
    # same gap up to the central translation
    assert abs((lo2 - lo) - round(lo2 - lo)) < 1e-9


def test_locator_rejects_limit_points(pants):
    loc = GapLocator(pants, pants.certificate, pants.gap_table, pants.gap_representatives)
    found, _ = loc.locate(sample_limit_points(pants, 50, np.random.default_rng(1)))
    assert not found.any()


def test_representative_gaps_on_fresh_rep(fresh):
    reps = representative_gaps(fresh, compute_minimal_set(fresh, 3))
    assert len(reps) == 3
