import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge_lab.circlemap import (PiecewiseLift, ProjectiveLift, Translation, check_alternation,
                                   fixed_points, translation_number)
from lozenge_lab.fuchsian import rot

xs_st = st.floats(-3, 3, allow_nan=False)


def sl2(draw_a, draw_b, draw_c):
    a, b, c = draw_a, draw_b, draw_c
    d = (1 + b * c) / a
    return np.array([[a, b], [c, d]])


mats = st.builds(sl2, st.floats(0.3, 3), st.floats(-2, 2), st.floats(-2, 2))


@settings(max_examples=50, deadline=None)
@given(mats, st.sampled_from([1, 2, 3]), xs_st)
def test_lift_commutes_with_tau(A, k, x):
    f = ProjectiveLift(A, k)
    assert abs(f(x + 1.0 / k) - f(x) - 1.0 / k) < 1e-10


@settings(max_examples=50, deadline=None)
@given(mats, st.sampled_from([1, 2]), xs_st)
def test_lift_inverse(A, k, x):
    f = ProjectiveLift(A, k)
    g = f.inverse()
    assert abs(g(f(x)) - x) < 1e-10


@settings(max_examples=30, deadline=None)
@given(mats, st.floats(0, 1, exclude_max=True))
def test_lift_matches_projective_action(A, x):
    # direction of A v for v at angle pi x, compared modulo pi
    f = ProjectiveLift(A, 1)
    v = A @ np.array([np.cos(np.pi * x), np.sin(np.pi * x)])
    th = np.arctan2(v[1], v[0]) / np.pi
    d = (float(f(x)) - th) % 1.0
    assert min(d, 1 - d) < 1e-10


@settings(max_examples=30, deadline=None)
@given(mats, st.floats(0, 1))
def test_log_derivative_finite_difference(A, x):
    f = ProjectiveLift(A, 1)
    h = 1e-6
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert abs(np.log(fd) - f.log_derivative(x)) < 1e-5


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_rotation_translation_number(t):
    for k in (1, 2):
        f = ProjectiveLift(rot(t), k)
        d = (float(translation_number(f, 200)) - t / (np.pi * k)) * k
        assert abs(d - round(d)) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_hyperbolic_fixed_points(k):
    lam = 3.0
    f = ProjectiveLift(np.diag([lam, 1 / lam]), k)
    recs = fixed_points(f)
    assert len(recs) == 2 * k
    assert check_alternation(recs)
    locs = np.array([r.location for r in recs])
    # eigendirections: angle 0 attracts, angle pi/2 repels
    expected = np.sort(np.concatenate([np.arange(k) / k, (np.arange(k) + 0.5) / k]))
    assert np.max(np.abs(np.sort(locs) - expected)) < 1e-9
    for r in recs:
        frac = (r.location * k) % 1.0
        assert r.type == ("attracting" if min(frac, 1 - frac) < 0.25 else "repelling")


def test_fixed_directions_match_eigenvectors():
    A = np.array([[2.0, 1.0], [1.0, 1.0]])
    f = ProjectiveLift(A)
    w, V = np.linalg.eig(A)
    ang = sorted((np.arctan2(V[1, i], V[0, i]) % np.pi) / np.pi for i in range(2))
    assert np.allclose(f.fixed_directions(), ang)


def test_reversing_lift_has_one_fixed_point():
    f = ProjectiveLift(np.diag([2.0, -0.5]))
    assert f.orientation == -1
    recs = fixed_points(f)
    assert len(recs) == 1 and recs[0].type == "reversing"
    assert abs(f(recs[0].location) - recs[0].location) < 1e-12


def test_piecewise_lift():
    f = PiecewiseLift([0, 0.5, 1], [0.1, 0.3, 1.1])
    x = np.linspace(-2, 2, 101)
    assert np.allclose(f(x + 1), f(x) + 1)
    assert np.allclose(f.inverse()(f(x)), x)
    assert np.allclose(np.exp(f.log_derivative(np.array([0.25, 0.75]))), [0.4, 1.6])
    with pytest.raises(ValueError):
        PiecewiseLift([0, 0.5, 1], [0.0, 0.6, 0.5])


def test_translation():
    T = Translation(0.25)
    assert T(1.0) == 1.25 and T.inverse()(1.25) == 1.0
    assert translation_number(T, 10) == pytest.approx(0.25)
    assert fixed_points(Translation(0.25)) == []
