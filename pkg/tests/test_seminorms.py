import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.algebra import GAUSSIAN_INTEGERS, INTEGERS, RATIONALS, Gaussian
from jointerg.polynomials import parse_polynomial
from jointerg.seminorms import (NumericalIntegrityError, closed_form_power, delta_iterated,
                                linear_seminorm_identity_check, power_sum_seminorm,
                                seminorm_closed_form_rotation, seminorm_truncated)
from jointerg.systems import RotationSystem, TrigObservable, act, parse_observable

ALPHA = "0.41421356237309504880168872420969807857"
Z_SYS = RotationSystem(INTEGERS, ((ALPHA,),))
Q_SYS = RotationSystem(RATIONALS, (("1",),))
ZI_SYS = RotationSystem(GAUSSIAN_INTEGERS, ((ALPHA, "0.73205080756887729352744634150587"),))

coeffs = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
observables = st.dictionaries(st.integers(-3, 3), coeffs, min_size=1, max_size=3).map(
    lambda d: TrigObservable(1, {(k,): c for k, c in d.items()}))


def gowers_grid(f, s):
    """
    Brute-force ``E_{x, h} prod_eps C^{|eps|} f(x + eps . h)`` on Z_G.

    This is the U^s norm of ``f`` on the circle (exact once
    ``G > 2^s * maxfreq``), which is the seminorm for any ergodic rotation.
    """
    G = 2 ** s * max(1, f.max_frequency()) + 1
    vals = f.grid_values(G)
    hs = range(G)

    def level(v, s):
        if s == 0:
            return v.mean()
        return np.mean([level(v * np.conj(np.roll(v, -h)), s - 1) for h in hs])

    return level(vals, s).real


@settings(max_examples=25, deadline=None)
@given(observables, st.integers(1, 3))
def test_closed_form_matches_grid_oracle(f, s):
    ref = gowers_grid(f, s)
    for sys in (Z_SYS, Q_SYS, ZI_SYS):
        assert closed_form_power(sys, f, s) == pytest.approx(ref, abs=1e-9)


def test_non_ergodic_closed_form_matches_oracle():
    sys = RotationSystem(INTEGERS, (("1/2",),))
    f = parse_observable("e(1) + 0.5*e(2) - 0.3*e(-3)")
    for s in (1, 2, 3):
        assert closed_form_power(sys, f, s, require_ergodic=False) == \
            pytest.approx(_half_oracle(f, s))


def _half_oracle(f, s):
    # rotation by 1/2: the shifts h_j live in {0, 1/2}
    G = 2 * (2 ** s * max(1, f.max_frequency()) + 1)
    vals = f.grid_values(G)

    def level(v, s):
        if s == 0:
            return v.mean()
        return np.mean([level(v * np.conj(np.roll(v, -h)), s - 1) for h in (0, G // 2)])

    return level(vals, s).real


def test_power_sum_agrees_only_at_s2():
    f = parse_observable("e(1) + 0.5*e(2)")
    assert seminorm_closed_form_rotation(Z_SYS, f, 2).value == pytest.approx(power_sum_seminorm(f, 2))
    assert seminorm_closed_form_rotation(Z_SYS, f, 3).value != pytest.approx(power_sum_seminorm(f, 3))


@settings(max_examples=25, deadline=None)
@given(observables, st.integers(-20, 20))
def test_shift_invariance(f, r):
    g = act(Z_SYS, r, f)
    for s in (1, 2, 3):
        assert closed_form_power(Z_SYS, g, s) == pytest.approx(closed_form_power(Z_SYS, f, s),
                                                              abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(observables)
def test_monotone_in_s(f):
    vals = [seminorm_closed_form_rotation(Z_SYS, f, s).value for s in (1, 2, 3)]
    assert vals[0] <= vals[1] + 1e-9 and vals[1] <= vals[2] + 1e-9


@pytest.mark.parametrize("c", [1.0, 0.3, 2j])
def test_constant_observable(c):
    f = TrigObservable.constant(1, c)
    for s in (1, 2, 3):
        assert seminorm_closed_form_rotation(Z_SYS, f, s).value == pytest.approx(abs(c))
        assert seminorm_truncated(Z_SYS, f, s, 5).value == pytest.approx(abs(c))


@pytest.mark.parametrize("sys", [Z_SYS, Q_SYS, ZI_SYS])
def test_eigenfunctions_have_seminorm_one(sys):
    for k in (1, -2, 5):
        f = TrigObservable.character(k)
        # s = 1 sees only the invariant part, which is 0 on an ergodic rotation
        assert closed_form_power(sys, f, 1) == 0.0
        for s in (2, 3):
            assert closed_form_power(sys, f, s) == 1.0


@settings(max_examples=20, deadline=None)
@given(observables, st.lists(st.integers(-9, 9), min_size=1, max_size=3))
def test_delta_iterated_cube_product(f, ns):
    delta_iterated(Z_SYS, f, ns, check=True)


def test_fejer_converges_to_closed_form():
    f = parse_observable("e(1) + e(-2) + 0.5*e(3)")
    for s in (1, 2, 3):
        ref = closed_form_power(Z_SYS, f, s)
        est = [seminorm_truncated(Z_SYS, f, s, N).power for N in (50, 500)]
        assert all(v >= 0 for v in est)
        assert abs(est[1] - ref) < abs(est[0] - ref) + 1e-12
        assert abs(est[1] - ref) < 0.05


def test_recursive_integrity_error():
    f = parse_observable("e(1) + e(-2) + 0.5*e(3)")
    with pytest.raises(NumericalIntegrityError):
        seminorm_truncated(Z_SYS, f, 1, 500, method="recursive")


def test_iterated_and_early_stop():
    f = parse_observable("e(1) + 0.5*e(2)")
    ref = seminorm_closed_form_rotation(Z_SYS, f, 2).value
    it = seminorm_truncated(Z_SYS, f, 2, [40, 40], method="iterated")
    assert it.value == pytest.approx(ref, abs=0.05)
    es = seminorm_truncated(Z_SYS, f, 3, 40, method="early_stop")
    assert es.value == pytest.approx(seminorm_closed_form_rotation(Z_SYS, f, 3).value, abs=0.05)
    with pytest.raises(ValueError):
        seminorm_truncated(Z_SYS, f, 2, [10], method="iterated")


def test_linear_identity_field_is_equality():
    p = parse_polynomial("n", RATIONALS)
    for text in ("e(1)", "e(1) + 0.5*e(2)"):
        res = linear_seminorm_identity_check(Q_SYS, parse_observable(text), p, 1, 3)
        assert res.gap < 0.05 and res.holds and res.bound_factor == 1


def test_linear_identity_ring_bound():
    sys = RotationSystem(INTEGERS, (("1/2",),))
    p = parse_polynomial("2n", INTEGERS)
    res = linear_seminorm_identity_check(sys, parse_observable("e(1) + 0.5*e(2)"), p, 1, 50)
    assert res.bound_factor == 2 and res.holds
    assert res.lhs > res.rhs  # the factor is needed here


def test_linear_identity_gaussian_factor():
    p = parse_polynomial("(1+i)*n", GAUSSIAN_INTEGERS)
    res = linear_seminorm_identity_check(ZI_SYS, parse_observable("e(1)"), p, 1, 3)
    assert res.bound_factor == Gaussian(1, 1).norm() == 2


def test_linear_identity_rejects_bad_p():
    with pytest.raises(ValueError):
        linear_seminorm_identity_check(Q_SYS, parse_observable("e(1)"),
                                       parse_polynomial("n^2", RATIONALS), 1, 3)
    with pytest.raises(ValueError):
        linear_seminorm_identity_check(Q_SYS, parse_observable("e(1)"),
                                       parse_polynomial("n + 1", RATIONALS), 1, 3)


def test_truncated_value_matches_power():
    f = parse_observable("e(1) - 0.4*e(2)")
    est = seminorm_truncated(Z_SYS, f, 2, 100)
    assert math.isclose(est.value ** 4, est.power, rel_tol=1e-12)
