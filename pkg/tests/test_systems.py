import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.algebra import GAUSSIAN_INTEGERS, INTEGERS, RATIONALS, ConfigurationError, Gaussian
from jointerg.systems import (RotationSystem, SupportBudgetError, TrigObservable,
                              check_total_ergodicity, multiply, parse_observable,
                              spectrum_eigenfunction)

ALPHA = "0.41421356237309504880168872420969807857"

coeffs = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
observables = st.dictionaries(st.integers(-4, 4), coeffs, min_size=1, max_size=4).map(
    lambda d: TrigObservable(1, {(k,): c for k, c in d.items()}))


@given(observables, observables, st.floats(0, 1))
def test_product_matches_pointwise(f, g, x):
    lhs = multiply(f, g).evaluate(x)
    assert abs(lhs - f.evaluate(x) * g.evaluate(x)) < 1e-9 * (1 + f.sup_bound() * g.sup_bound())


@settings(max_examples=40)
@given(observables)
def test_parseval_against_grid(f):
    G = 2 * f.max_frequency() + 3
    vals = f.grid_values(G)
    assert math.isclose(f.l2_norm(), float(np.sqrt(np.mean(np.abs(vals) ** 2))),
                        rel_tol=1e-9, abs_tol=1e-12)
    assert abs(f.integral() - vals.mean()) < 1e-9


@given(observables)
def test_text_round_trip(f):
    g = parse_observable(f.to_text(16), 1)
    assert f.distance(g) < 1e-9


def test_parse_observable_forms():
    f = parse_observable("0.5*e(1) + 0.5*e(-1)")
    assert f.evaluate(0.0) == pytest.approx(1.0)
    g = parse_observable("e(1,-2) - 2i*e(0,1) + 3", 2)
    assert g.dim == 2 and g.integral() == 3
    assert g.coefficient((0, 1)) == -2j
    with pytest.raises(ValueError):
        parse_observable("e(1) + e(1,2)")
    with pytest.raises(ValueError):
        parse_observable("")


def test_multiply_budget():
    f = TrigObservable(1, {(k,): 1 for k in range(10)})
    with pytest.raises(SupportBudgetError):
        multiply(f, f, budget=50)


def test_rotation_action_on_z():
    sys = RotationSystem(INTEGERS, (("1/3",),))
    f = TrigObservable.character(1)
    g = sys.act(2, f)
    assert g.coefficient(1) == pytest.approx(cmath.exp(2j * math.pi * 2 / 3))
    assert sys.rotation(4) == (Fraction(1, 3),)


def test_rotation_shape_errors():
    with pytest.raises(ConfigurationError):
        RotationSystem(GAUSSIAN_INTEGERS, (("1/2",),))
    with pytest.raises(ConfigurationError):
        RotationSystem(INTEGERS, ())


@pytest.mark.parametrize("ring,phi,probe", [
    (INTEGERS, ((ALPHA,),), 7),
    (GAUSSIAN_INTEGERS, ((ALPHA, "0.7320508075688772935"),), Gaussian(2, -3)),
    (RATIONALS, (("1",),), Fraction(5, 6)),
])
def test_eigenfunction_relation(ring, phi, probe):
    sys = RotationSystem(ring, phi)
    f, chi = spectrum_eigenfunction(sys, 3)
    assert sys.act(probe, f).distance(f.scale(chi(probe))) < 1e-12


def test_total_ergodicity():
    ok, _ = check_total_ergodicity(RotationSystem(INTEGERS, ((ALPHA,),)))
    assert ok
    ok, w = check_total_ergodicity(RotationSystem(INTEGERS, (("1/2",),)))
    assert not ok and w["ideal"] == 2
    ok, w = check_total_ergodicity(RotationSystem(INTEGERS, ((ALPHA,), ("1/3",))))
    # the second coordinate is fixed by 3Z
    assert not ok and w["ideal"] == 3 and w["kappa"][0] == 0
    assert RotationSystem(RATIONALS, (("1",),)).is_ergodic()
    assert not RotationSystem(INTEGERS, (("0",),)).is_ergodic()
