import math

import pytest
import scipy.optimize
import scipy.special
from hypothesis import given, settings, strategies as st

from robinlayer.errors import BracketError
from robinlayer.oracles import ShootingProblem, cross_validate, disk_shooting, integrate_rk4


def bessel_reference(R, alpha, m):
    """Ground level of sector m from k I_m'(k R) = alpha I_m(k R), E = -k^2."""

    def g(k):
        x = k * R
        # scaled Bessel functions share the e^{x} factor, so the ratio is exact
        return k * scipy.special.ive(m + 1, x) + (m / R) * scipy.special.ive(m, x) - alpha * scipy.special.ive(m, x)

    k = scipy.optimize.brentq(g, 1e-8, alpha + 10.0 / R, xtol=1e-15, rtol=1e-15)
    return -k * k


def test_small_alpha_tends_to_neumann():
    E = disk_shooting(ShootingProblem(1.0, 1e-4, 0))
    assert E < 0 and abs(E) < 1e-3
    # first order: E ~ -2 alpha / R (boundary length over area)
    assert E == pytest.approx(-2e-4, rel=1e-3)


def test_rk4_and_taylor_agree():
    p = ShootingProblem(1.0, 1.0, 0)
    a = disk_shooting(p, method="rk4")
    b = disk_shooting(p, method="taylor")
    assert -1.0 - 2.0 < a < 0
    assert abs(a - b) <= 1e-9


@pytest.mark.parametrize("R,alpha,m", [(1.0, 1.0, 0), (1.0, 10.0, 0), (2.0, 5.0, 1), (1.0, 20.0, 3)])
def test_matches_bessel_secular_equation(R, alpha, m):
    assert disk_shooting(ShootingProblem(R, alpha, m)) == pytest.approx(bessel_reference(R, alpha, m), abs=1e-9 * max(1, alpha**2))


def test_remainder_window_stays_bounded():
    # curvature is 1 on the unit circle, so E + alpha^2 + alpha should stay O(1)
    r10 = disk_shooting(ShootingProblem(1.0, 10.0, 0)) + 110.0
    r20 = disk_shooting(ShootingProblem(1.0, 20.0, 0)) + 420.0
    assert abs(r10) < 1.0
    assert abs(r20) <= 2 * abs(r10)


def test_increasing_in_angular_mode():
    vals = [disk_shooting(ShootingProblem(1.0, 6.0, m)) for m in range(4)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_invariant_under_tighter_steps():
    p = ShootingProblem(1.0, 8.0, 1)
    assert abs(disk_shooting(p, tol=1e-12) - disk_shooting(p, tol=1e-12 / 32)) <= 1e-9


def test_no_sign_change_raises():
    with pytest.raises(BracketError, match="E_lo"):
        disk_shooting(ShootingProblem(1.0, 5.0, 0, E_lo=1.0, E_hi=2.0))


def test_empty_bracket_rejected():
    with pytest.raises(ValueError):
        disk_shooting(ShootingProblem(1.0, 5.0, 0, E_lo=2.0, E_hi=1.0))


@pytest.mark.parametrize("kw", [dict(R=0.0), dict(R=-1.0), dict(alpha=0.0), dict(alpha=math.inf), dict(m=-1), dict(m=1.5)])
def test_problem_validation(kw):
    with pytest.raises(ValueError):
        ShootingProblem(**kw)


def test_unknown_integrator():
    with pytest.raises(ValueError):
        disk_shooting(ShootingProblem(), method="euler")


def test_cross_validate_examples():
    assert cross_validate(1.0, 1.0 + 1e-12, 1e-9)
    assert not cross_validate(1.0, 2.0, 1e-9)


def test_regular_start_matches_series():
    # at E = 0, m = 0 the regular solution is constant
    f, df = integrate_rk4(0.0, 1.0, 0)
    assert abs(df / f) < 1e-10


@settings(max_examples=8)
@given(R=st.floats(0.5, 3.0), alpha=st.floats(0.1, 15.0), m=st.integers(0, 2))
def test_shooting_matches_bessel_property(R, alpha, m):
    ref = bessel_reference(R, alpha, m)
    assert disk_shooting(ShootingProblem(R, alpha, m)) == pytest.approx(ref, abs=1e-8 * max(1.0, abs(ref)))
