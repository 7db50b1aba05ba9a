import cmath
import math
from fractions import Fraction

import pytest

from jointerg.algebra import (GAUSSIAN_INTEGERS, INTEGERS, RATIONALS, Character,
                              ConfigurationError, FolnerSequence, Gaussian)
from jointerg.equidist import (CharacterSumSpec, CosetFolner, IntegrityError, character_sum,
                               character_sum_sweep, coset_reduction, default_threshold,
                               dirichlet_ratio, is_relation, linear_coefficients,
                               single_character_average, weyl_difference_reduce)
from jointerg.polynomials import PolySystem, parse_polynomial

ALPHA = "0.41421356237309504880168872420969807857"
GOLD = "0.61803398874989484820458683436563811772"


def spec(ring, freqs, polys, folner=None):
    folner = folner or FolnerSequence(ring, "rational_ladder" if ring.is_field() else "centered_box")
    chars = [Character(ring, f if isinstance(f, tuple) else (f,)) for f in freqs]
    return CharacterSumSpec(ring, chars, PolySystem.parse(polys, ring), folner)


def brute_sum(sp, N):
    total = 0j
    for n in sp.folner.elements(N):
        total += math.prod((chi(p.evaluate([n])) for chi, p in zip(sp.characters, sp.polys)),
                           start=1 + 0j)
    return total / len(sp.folner.elements(N)) * cmath.exp(2j * math.pi * float(sp.factor))


@pytest.mark.parametrize("ring,freqs,polys,N", [
    (INTEGERS, [ALPHA, GOLD], "n^2, n^3", 30),
    (GAUSSIAN_INTEGERS, [(ALPHA, GOLD)], "(1+i)*n^2", 4),
    (RATIONALS, ["1", "1/3"], "n, n^2", 3),
])
def test_character_sum_matches_brute_force(ring, freqs, polys, N):
    sp = spec(ring, freqs, polys)
    assert abs(character_sum(sp, N) - brute_sum(sp, N)) < 1e-10


def test_all_trivial_is_exactly_one():
    assert character_sum(spec(INTEGERS, ["1", "0"], "n^2, n"), 50) == 1
    assert character_sum(spec(GAUSSIAN_INTEGERS, [("1", "2")], "n^2"), 5) == 1
    assert character_sum(spec(RATIONALS, ["0"], "n"), 3) == 1


def test_irrational_sums_decay():
    rows = character_sum_sweep(spec(INTEGERS, [ALPHA], "n^2"), [64, 512, 2048])
    assert rows[-1].passed and abs(rows[-1].value) < 0.05
    assert rows[0].threshold == default_threshold(129)


def test_rational_character_does_not_decay():
    # e(n^2 / 3) averages to (1 + 2 e(1/3)) / 3, of modulus 1/sqrt(3)
    sp = spec(INTEGERS, ["1/3"], "n^2")
    assert abs(character_sum(sp, 3000)) == pytest.approx(1 / math.sqrt(3), abs=1e-3)


def test_weyl_reduce_examples():
    red = weyl_difference_reduce(spec(INTEGERS, [ALPHA], "n^3"), [1, 1])
    assert red.polys[0] == parse_polynomial("6n + 6", INTEGERS)
    red = weyl_difference_reduce(spec(GAUSSIAN_INTEGERS, [(ALPHA, GOLD)], "n^2"), [Gaussian(0, 1)])
    assert red.polys[0] == parse_polynomial("2i*n - 1", GAUSSIAN_INTEGERS)
    assert linear_coefficients(red) == [(Gaussian(0, 2), Gaussian(-1))]
    with pytest.raises(ValueError):
        weyl_difference_reduce(spec(INTEGERS, [ALPHA], "n^3"), [1])
    with pytest.raises(ValueError):
        weyl_difference_reduce(spec(INTEGERS, [ALPHA], "n^2"), [0])


def test_is_relation():
    chars = [Character(INTEGERS, ("-0.8",)), Character(INTEGERS, ("0.4",))]
    assert is_relation(chars, [1, 2])
    assert not is_relation(chars, [1, 1])


def _z_relation_spec():
    # chi_1 = e(-2 a .), chi_2 = e(a .) satisfy chi_1(x) chi_2(2x) = 1
    a = Fraction(ALPHA)
    return spec(INTEGERS, [str(-2 * a), ALPHA], "n^3 + n, 2n^3 + n^2")


def test_coset_reduction_recombines_on_z():
    sp = _z_relation_spec()
    red = coset_reduction(sp, [1, 2])
    assert red.eliminated == 1 and len(red.specs) == 2
    for N in (10, 33):
        assert abs(red.recombine(N) - character_sum(sp, N)) < 1e-10


def test_coset_reduction_recombines_on_gaussian():
    f = (Fraction(ALPHA), Fraction(GOLD))
    chi2 = Character(GAUSSIAN_INTEGERS, f)
    # chi_1(x) = chi_2(-(1+i) x) makes b = (1, 1+i) a relation
    chi1 = chi2.scaled(Gaussian(-1, -1))
    sp = CharacterSumSpec(GAUSSIAN_INTEGERS, [chi1, chi2],
                          PolySystem.parse("n^2, (1+i)*n^2 + n", GAUSSIAN_INTEGERS),
                          FolnerSequence(GAUSSIAN_INTEGERS))
    b = (Gaussian(1), Gaussian(1, 1))
    assert is_relation(sp.characters, b)
    red = coset_reduction(sp, b)
    assert len(red.specs) == 2
    for N in (3, 6):
        assert abs(red.recombine(N) - character_sum(sp, N)) < 1e-10


def test_coset_weights_balance():
    red = coset_reduction(_z_relation_spec(), [1, 2])
    for N in (64, 200):
        assert all(abs(float(w) - 0.5) < 0.1 for w in red.weights(N))
    zi = CosetFolner(FolnerSequence(GAUSSIAN_INTEGERS), Gaussian(1, 1), Gaussian(0))
    ratio = zi.size(64) / FolnerSequence(GAUSSIAN_INTEGERS).size(64)
    assert abs(ratio - 0.5) < 0.1


def test_coset_folner_elements():
    cf = CosetFolner(FolnerSequence(INTEGERS), 3, 1)
    assert cf.elements(4) == [-1, 0, 1]  # 3x + 1 in {-4..4}


def test_coset_reduction_integrity():
    sp = _z_relation_spec()
    with pytest.raises(IntegrityError):
        coset_reduction(sp, [1, 1])
    with pytest.raises(ValueError):
        coset_reduction(sp, [0, 0])
    # eliminating the only cubic member would lose the top degree
    a = Fraction(ALPHA)
    with pytest.raises(IntegrityError, match="top-degree"):
        coset_reduction(spec(INTEGERS, [str(-2 * a), ALPHA], "n, n^3"), [1, 2])
    with pytest.raises(ConfigurationError):
        coset_reduction(spec(RATIONALS, ["1", "1"], "n, n^2"), [1, -1])


def test_single_character_average():
    half = Character(INTEGERS, ("1/2",))
    assert single_character_average(half, FolnerSequence(INTEGERS), 10) == pytest.approx(1 / 21)
    g = Character(INTEGERS, (GOLD,))
    assert single_character_average(g, FolnerSequence(INTEGERS), 100) == \
        pytest.approx(dirichlet_ratio(float(Fraction(GOLD)), 100), abs=1e-12)
    with pytest.raises(ValueError):
        single_character_average(Character(INTEGERS, ("1",)), FolnerSequence(INTEGERS), 5)


def test_validate_hypotheses():
    with pytest.raises(ConfigurationError, match="witness"):
        spec(INTEGERS, [ALPHA, GOLD], "n, 2n").validate_hypotheses()
    with pytest.raises(ConfigurationError):
        spec(INTEGERS, [ALPHA], "n^2 + 1").validate_hypotheses()
    spec(INTEGERS, [ALPHA, GOLD], "n, n^2").validate_hypotheses()
