import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.algebra import (GAUSSIAN_INTEGERS, INTEGERS, RATIONALS, BudgetError, Character,
                              ConfigurationError, FolnerSequence, Gaussian, I, Ideal,
                              char_is_irrational, coset_decompose, e, folner_defect,
                              ideal_generated_by, ring_gcd)

ints = st.integers(-50, 50)
gaussians = st.builds(Gaussian, ints, ints)


@given(gaussians, gaussians, gaussians)
def test_gaussian_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a - a) == Gaussian(0)


@given(gaussians, gaussians.filter(bool))
def test_gaussian_division_is_exact(a, b):
    q = a / b
    assert q * b == a


def test_gaussian_integral_parts_are_ints():
    z = Gaussian(Fraction(4, 2), 3)
    assert isinstance(z.real, int)
    assert hash(Gaussian(5)) == hash(5)
    assert I * I == -1


def test_ring_coerce_rejects_non_members():
    with pytest.raises(ValueError):
        INTEGERS.coerce(Fraction(1, 2))
    with pytest.raises(ValueError):
        GAUSSIAN_INTEGERS.coerce(Gaussian(Fraction(1, 2), 0))
    assert RATIONALS.coerce(3) == Fraction(3)
    assert not INTEGERS.contains(I)


def test_exp_of_exact_phase():
    assert abs(e(Fraction(1, 4)) - 1j) < 1e-15
    assert e(Fraction(7)) == pytest.approx(1)


@pytest.mark.parametrize("ring,family,N", [
    (INTEGERS, "centered_box", 5),
    (GAUSSIAN_INTEGERS, "centered_box", 3),
    (RATIONALS, "rational_ladder", 3),
])
def test_folner_size_matches_elements(ring, family, N):
    for half_open in (False, True):
        seq = FolnerSequence(ring, family, half_open=half_open)
        els = seq.elements(N)
        assert len(els) == seq.size(N) == len(set(els))


def test_folner_family_rejected_on_wrong_ring():
    with pytest.raises(ConfigurationError):
        FolnerSequence(INTEGERS, "rational_ladder")
    with pytest.raises(ConfigurationError):
        FolnerSequence(RATIONALS, "centered_box")
    with pytest.raises(ConfigurationError):
        FolnerSequence(INTEGERS, "shifted_box")


def test_folner_budget():
    seq = FolnerSequence(INTEGERS, max_size=10)
    with pytest.raises(BudgetError):
        seq.elements(10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(-4, 4))
def test_folner_defect_matches_brute_force_on_z(N, g):
    seq = FolnerSequence(INTEGERS)
    box = set(range(-N, N + 1))
    brute = Fraction(len(box ^ {x + g for x in box}), len(box))
    assert folner_defect(seq, N, g) == brute == Fraction(min(2 * abs(g), 2 * len(box)), len(box))


def test_folner_defect_decays():
    for ring, fam, g in [(INTEGERS, "centered_box", 3),
                         (GAUSSIAN_INTEGERS, "centered_box", Gaussian(1, 2)),
                         (RATIONALS, "rational_ladder", Fraction(1, 2))]:
        seq = FolnerSequence(ring, fam)
        defects = [folner_defect(seq, N, g) for N in (2, 3, 4, 5)]
        assert defects[-1] < defects[0]


def test_shifted_box_is_translate():
    seq = FolnerSequence(INTEGERS, "shifted_box", offset=2)
    assert seq.elements(3) == [x + 6 for x in range(-3, 4)]


def test_character_phase_exact_and_scaled():
    chi = Character(GAUSSIAN_INTEGERS, ("1/3", "1/5"))
    r, b = Gaussian(2, -7), Gaussian(1, 1)
    assert chi.scaled(b).phase(r) == chi.phase(b * r)
    assert Character(INTEGERS, ("3/7",)).phase(5) == Fraction(1, 7)
    assert Character(INTEGERS, ("1",)).is_trivial()
    assert not Character(RATIONALS, ("1",)).is_trivial()


def test_char_is_irrational_finds_witness():
    ok, b = char_is_irrational(Character(INTEGERS, ("3/7",)))
    assert not ok and b == 7
    ok, b = char_is_irrational(Character(GAUSSIAN_INTEGERS, ("1/2", "1/2")))
    assert not ok and Character(GAUSSIAN_INTEGERS, ("1/2", "1/2")).scaled(b).is_trivial()
    ok, b = char_is_irrational(Character(INTEGERS, ("0.41421356237309504880",)))
    assert ok and b is None


@given(st.integers(-30, 30).filter(bool), st.lists(ints, min_size=1, max_size=30))
def test_integer_ideal_cosets(m, xs):
    J = Ideal(INTEGERS, m)
    assert J.index() == abs(m)
    parts = coset_decompose(xs, J)
    assert sum(len(v) for v in parts.values()) == len(xs)
    for rep, members in parts.items():
        assert all((x - rep) % m == 0 for x in members)


@given(gaussians.filter(bool))
@settings(max_examples=40)
def test_gaussian_ideal_representatives(g):
    J = Ideal(GAUSSIAN_INTEGERS, g)
    reps = J.coset_representatives()
    assert len(reps) == J.index() == g.norm()
    # representatives are canonical and pairwise inequivalent
    assert all(J.residue(r) == r for r in reps)
    assert len({J.residue(r) for r in reps}) == len(reps)


@given(gaussians.filter(bool), gaussians)
@settings(max_examples=60)
def test_gaussian_residue_is_congruent(g, x):
    J = Ideal(GAUSSIAN_INTEGERS, g)
    d = (x - J.residue(x)) / g
    assert d.is_integral


def test_ideal_generated_by():
    assert ideal_generated_by(INTEGERS, [4, 6]).index() == 2
    J = ideal_generated_by(GAUSSIAN_INTEGERS, [Gaussian(2), Gaussian(1, 1)])
    assert J.index() == 2
    assert ring_gcd(INTEGERS, 0, 5) == 5
    assert Ideal(INTEGERS, 0).index() == math.inf
    with pytest.raises(ConfigurationError):
        Ideal(RATIONALS, 2)
