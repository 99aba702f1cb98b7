from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lozenge_lab.presentation import (OrbifoldSignature, Presentation, SignatureError, UnknownGenerator,
                                      boundary_power, inverse, parse_word, power, random_word, word_str)

PANTS = Presentation(OrbifoldSignature(0, True, (), 3, 1))
TORSION = Presentation(OrbifoldSignature(0, True, (2, 3), 1, 1))
NONOR = Presentation(OrbifoldSignature(1, False, (), 2, 1))


def words(pres, max_size=10):
    letters = [(g, e) for g in pres.generators for e in (1, -1)]
    return st.lists(st.sampled_from(letters), max_size=max_size).map(tuple)


@pytest.mark.parametrize("sig, chi", [
    (OrbifoldSignature(0, True, (), 3, 1), Fraction(-1)),
    (OrbifoldSignature(1, True, (), 1, 1), Fraction(-1)),
    (OrbifoldSignature(0, True, (2, 3), 1, 1), Fraction(-1, 6)),
    (OrbifoldSignature(1, False, (), 2, 1), Fraction(-1)),
    (OrbifoldSignature(2, True, (), 1, 1), Fraction(-3)),
])
def test_euler_characteristic(sig, chi):
    assert sig.euler_characteristic() == chi


@pytest.mark.parametrize("sig", [
    OrbifoldSignature(0, True, (), 2, 1),       # annulus
    OrbifoldSignature(0, True, (2, 2), 1, 1),   # chi = 0
    OrbifoldSignature(0, True, (), 0, 1),       # closed
    OrbifoldSignature(0, False, (), 2, 1),      # no cross-cap
    OrbifoldSignature(0, True, (), 3, 0),
    OrbifoldSignature(0, True, (1,), 3, 1),
])
def test_invalid_signatures_rejected(sig):
    with pytest.raises(SignatureError):
        Presentation(sig)


def test_generator_counts():
    assert PANTS.generators == ["c1", "c2"]
    assert TORSION.generators == ["d1", "d2"]
    assert Presentation(OrbifoldSignature(1, True, (), 1, 1)).generators == ["a1", "b1"]
    assert NONOR.generators == ["a1", "c1"]


def test_relations_hold_in_normal_form():
    for pres in (PANTS, TORSION, NONOR):
        for r in pres.relations():
            assert pres.normal_form(r) == ()


def test_torsion_reduction():
    assert TORSION.normal_form((("d1", 1),) * 2) == ()
    assert TORSION.normal_form((("d2", -1),)) == (("d2", 1),) * 2
    assert TORSION.length((("d2", 1),) * 2) == 1


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        PANTS.normal_form((("z", 1),))


def test_parse_roundtrip():
    w = (("c1", 1), ("c2", -1), ("c2", -1))
    assert parse_word(word_str(w)) == w


def test_reduced_word_count_free_group():
    # free group of rank 2: 1 + 4 + 4*3 + 4*9 words of length <= 3
    assert len(PANTS.reduced_words(3)) == 1 + 4 + 12 + 36


def test_orientation_of_cross_cap_letters():
    assert NONOR.orientation("a1") == -1
    assert NONOR.word_orientation((("a1", 1), ("a1", 1))) == 1


def test_boundary_power():
    c1, c2 = ("c1", 1), ("c2", 1)
    assert boundary_power(PANTS, (c1,) * 3) == (1, 3, ())
    i, n, u = boundary_power(PANTS, (c2, ("c1", -1), ("c1", -1), ("c2", -1)))
    assert (i, n) == (1, -2) and PANTS.normal_form(u) == (c2,)
    assert boundary_power(PANTS, (c1, c2))[:2] == (3, -1)
    assert boundary_power(PANTS, (c1, ("c2", -1))) is None


@settings(max_examples=60, deadline=None)
@given(words(PANTS), words(PANTS))
def test_normal_form_is_a_group_law(u, v):
    nf = PANTS.normal_form
    assert nf(nf(u)) == nf(u)
    assert nf(u + inverse(u)) == ()
    assert nf(u + v) == nf(nf(u) + nf(v))


@settings(max_examples=40, deadline=None)
@given(words(TORSION, 8))
def test_torsion_normal_form_inverse(u):
    assert TORSION.normal_form(u + inverse(u)) == ()


@settings(max_examples=30, deadline=None)
@given(words(PANTS, 5), st.sampled_from([1, 2, 3]), st.sampled_from([1, -1]))
def test_conjugator_recovers_conjugates(u, i, s):
    c = PANTS.boundary[f"c{i}"]
    t = power(c, s)
    w = PANTS.normal_form(u + t + inverse(u))
    found = PANTS.is_boundary_conjugate(w)
    assert found is not None
    j, v, sgn = found
    assert PANTS.normal_form(v + power(PANTS.boundary[f"c{j}"], sgn) + inverse(v)) == w


def test_random_word_has_no_cancellation():
    rng = np.random.default_rng(0)
    for pres in (PANTS, TORSION):
        for _ in range(20):
            w = random_word(pres, 7, rng)
            assert pres.length(w) == 7
