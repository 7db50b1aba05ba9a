from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.algebra import GAUSSIAN_INTEGERS, INTEGERS, RATIONALS, Gaussian
from jointerg.polynomials import (PolySystem, PolynomialSyntaxError, RingPolynomial, difference,
                                  is_essentially_distinct, is_independent, parse_polynomial,
                                  split_top_level)


def int_poly(nvars=2, max_deg=3):
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    terms = st.dictionaries(exps, st.integers(-6, 6), max_size=5)
    return terms.map(lambda t: RingPolynomial(INTEGERS, nvars, t))


points = st.tuples(st.integers(-9, 9), st.integers(-9, 9))


@given(int_poly())
def test_text_round_trip(p):
    assert parse_polynomial(p.to_text(), INTEGERS, nvars=2) == p


@given(int_poly(), int_poly(), points)
def test_arithmetic_commutes_with_evaluation(p, q, x):
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(int_poly(), points, points)
def test_difference_is_pointwise(p, h, x):
    d = difference(p, h)
    assert d(x) == p((x[0] + h[0], x[1] + h[1])) - p(x)
    if p.degree >= 1:
        assert d.degree <= p.degree - 1 or d.is_zero()


@settings(max_examples=60)
@given(int_poly(), int_poly(), int_poly(), points)
def test_substitute_affine_path_matches_generic(p, a, b, x):
    # x_j + c images take the binomial fast path; a generic image forces the slow path
    ring, nv = INTEGERS, 2
    g0 = RingPolynomial.variable(ring, nv, 0)
    g1 = RingPolynomial.variable(ring, nv, 1)
    fast = p.substitute([g1 + 3, g0 - 2])
    assert fast(x) == p((x[1] + 3, x[0] - 2))
    slow = p.substitute([a, b])
    assert slow(x) == p((a(x), b(x)))


def test_parse_examples():
    p = parse_polynomial("3*n^2 + 2n - 1", INTEGERS)
    assert [p(k) for k in (0, 1, 2)] == [-1, 4, 15]
    z = parse_polynomial("(1+i)*n^2", GAUSSIAN_INTEGERS)
    assert z(Gaussian(0, 1)) == Gaussian(-1, -1)
    q = parse_polynomial("n^2/2", RATIONALS)
    assert q(3) == Fraction(9, 2)
    assert parse_polynomial("g1*g2 + g3", INTEGERS).nvars == 3


@pytest.mark.parametrize("text,ring", [
    ("n^", INTEGERS),
    ("i*n", INTEGERS),
    ("n/2", INTEGERS),
    ("(n + 1", INTEGERS),
    ("n^-1", INTEGERS),
])
def test_parse_errors(text, ring):
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial(text, ring)


def test_split_top_level_keeps_parentheses():
    assert split_top_level("{(1+i)*n, n^2}") == ["(1+i)*n", "n^2"]


def test_independence_witness():
    ok, w = is_independent(PolySystem.parse("n, 2n", INTEGERS))
    assert not ok and w == (2, -1)
    ok, w = is_independent(PolySystem.parse("n, n^2 + 1, 3n - n^2", INTEGERS))
    assert not ok and w == (3, -1, -1)
    assert is_independent(PolySystem.parse("n, n^2, n^3", INTEGERS)) == (True, None)
    ok, w = is_independent(PolySystem.parse("n, i*n", GAUSSIAN_INTEGERS))
    assert not ok


def test_essentially_distinct():
    assert is_essentially_distinct(PolySystem.parse("n^2, n^2 + n", INTEGERS))
    assert not is_essentially_distinct(PolySystem.parse("n^2, n^2 + 5", INTEGERS))


def test_divide_exact():
    p = parse_polynomial("(2+2i)*n^2 + 2i", GAUSSIAN_INTEGERS)
    assert p.divide_exact(Gaussian(1, 1)) == parse_polynomial("2*n^2 + 1 + i", GAUSSIAN_INTEGERS)
    with pytest.raises(ArithmeticError):
        parse_polynomial("3n", INTEGERS).divide_exact(2)
