import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solistat.core import (
    DiracReduced,
    GeneralF,
    LogAbsAntiderivative,
    PhiSinPhiTerm,
    PowerAntiderivative,
    PowerLaw,
    PowerTerm,
    WaveFrame,
    as_power_law,
    boost_compose,
    canonicalize,
    dirac_rho_ode,
    equivalent,
    eval_F,
    eval_F_over_phi,
    first_integral,
    p_transform,
    potential,
    reduce_to_ode,
)
from solistat.errors import DomainError, FrameError, UnsupportedFormError

unit_speed = st.floats(min_value=-0.99, max_value=0.99)


# --- value types --------------------------------------------------------------


def test_powerlaw_canonical_form_is_single_power_term():
    canon = canonicalize(PowerLaw(2.0, 4.0 * math.pi, 2.0))
    assert canon == GeneralF(2.0, (PowerTerm(-4.0 * math.pi, 3.0),))
    assert equivalent(PowerLaw(2.0, 3.0, 2.0), GeneralF(2.0, [PowerTerm(-3.0, 3.0)]))
    assert not equivalent(PowerLaw(2.0, 3.0, 2.0), PowerLaw(2.0, 3.0, 1.0))


def test_canonicalize_merges_like_powers_and_drops_zeros():
    spec = GeneralF(0.0, [PowerTerm(1.0, 2.0), PowerTerm(2.0, 2.0), PowerTerm(5.0, 4.0), PowerTerm(-5.0, 4.0)])
    assert canonicalize(spec).terms == (PowerTerm(3.0, 2.0),)
    assert as_power_law(spec) == PowerLaw(0.0, -3.0, 1.0)


def test_as_power_law_rejects_multi_term():
    assert as_power_law(GeneralF(0.0, [PowerTerm(1.0, 2.0), PowerTerm(-2.0, 4.0)])) is None
    assert as_power_law(DiracReduced(1.0, 1.0, 1)) is None


@pytest.mark.parametrize(
    "make",
    [
        lambda: PowerLaw(math.nan, 1.0, 1.0),
        lambda: PowerTerm(math.inf, 1.0),
        lambda: DiracReduced(0.0, 1.0, 1),
        lambda: DiracReduced(1.0, 0.0, 1),
        lambda: DiracReduced(1.0, 1.0, 2),
    ],
)
def test_invalid_specs_raise(make):
    with pytest.raises(DomainError):
        make()


@pytest.mark.parametrize("u", [1.0, -1.0, 1.2, math.nan])
def test_frame_rejects_superluminal(u):
    with pytest.raises(FrameError):
        WaveFrame(u)


def test_frame_eta():
    fr = WaveFrame(0.6)
    assert fr.gamma == pytest.approx(1.25)
    assert fr.eta(1.0, 1.0) == pytest.approx(0.5)


def test_eval_helpers_agree():
    spec = GeneralF(0.0, [PowerTerm(1.0, 2.0), PowerTerm(-2.0, 4.0), PhiSinPhiTerm(0.5)])
    phi = np.linspace(0.1, 2.0, 7)
    np.testing.assert_allclose(eval_F_over_phi(spec, phi) * phi, eval_F(spec, phi), rtol=1e-14)
    # potential is an antiderivative of F/phi
    h = 1e-5
    dV = (potential(spec, phi + h) - potential(spec, phi - h)) / (2 * h)
    np.testing.assert_allclose(dV, eval_F_over_phi(spec, phi), rtol=1e-8)


def test_F_over_phi_finite_at_zero_for_integer_powers():
    spec = GeneralF(0.0, [PowerTerm(-1.0, 1.0), PowerTerm(1.0, 4.0)])
    assert eval_F_over_phi(spec, 0.0) == -1.0


# --- reduce_to_ode --------------------------------------------------------------


def test_reduce_power_law_bell():
    ode = reduce_to_ode(PowerLaw(2.0, 4.0 * math.pi, 2.0), WaveFrame(0.0))
    assert ode.a == 2.0
    # phi phi'' - 2 phi'^2 + 4 pi phi^3 = 0
    phi, dphi = 0.7, -0.3
    ddphi = ode.second_derivative(phi, dphi)
    assert phi * ddphi - 2 * dphi ** 2 + 4 * math.pi * phi ** 3 == pytest.approx(0.0, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(unit_speed)
def test_reduction_is_frame_independent(u):
    spec = PowerLaw(2.0, 4.0 * math.pi, 2.0)
    assert reduce_to_ode(spec, WaveFrame(u)).spec == reduce_to_ode(spec, WaveFrame(0.0)).spec


def test_reduce_rejects_luminal_and_dirac():
    with pytest.raises(FrameError):
        reduce_to_ode(PowerLaw(2.0, 1.0, 2.0), 1.0)
    with pytest.raises(UnsupportedFormError):
        reduce_to_ode(DiracReduced(1.0, 1.0, 1), WaveFrame())


# --- first_integral -------------------------------------------------------------


def test_first_integral_rational_bell_family():
    b, C = 1.7, -3.0
    fi = first_integral(PowerLaw(2.0, b, 2.0), C)
    assert fi.terms == (PowerAntiderivative(2.0 * b, -1.0),)
    phi = np.array([0.2, 0.9, 3.0])
    np.testing.assert_allclose(fi.slope_squared(phi), phi ** 4 * (C + 2 * b / phi), rtol=1e-14)


def test_first_integral_log_case():
    b, C = 0.8, 1.5
    fi = first_integral(PowerLaw(1.0, b, 1.0), C)
    assert fi.terms == (LogAbsAntiderivative(-2.0 * b),)
    phi = np.array([0.1, 0.5, 2.0])
    np.testing.assert_allclose(fi.slope_squared(phi), phi ** 2 * (C - 2 * b * np.log(phi)), rtol=1e-14)


def test_first_integral_klein_gordon():
    m2, alpha, beta2, C0 = 1.3, 0.7, 0.25, 0.4
    spec = GeneralF(0.0, [PowerTerm(m2, 2.0), PowerTerm(alpha, 4.0), PowerTerm(beta2, 6.0)])
    fi = first_integral(spec, C0)
    phi = np.linspace(0.1, 1.5, 9)
    expected = m2 * phi ** 2 + 0.5 * alpha * phi ** 4 + beta2 / 3.0 * phi ** 6 + C0
    np.testing.assert_allclose(fi.slope_squared(phi), expected, rtol=1e-14)


def test_first_integral_sine_gordon_and_unsupported():
    fi = first_integral(GeneralF(0.0, [PhiSinPhiTerm(1.0)]), 2.0)
    phi = np.linspace(0.1, 6.0, 11)
    np.testing.assert_allclose(fi.slope_squared(phi), 2.0 - 2.0 * np.cos(phi), atol=1e-14)
    with pytest.raises(UnsupportedFormError):
        first_integral(GeneralF(1.0, [PhiSinPhiTerm(1.0)]))


def test_first_integral_derivative_matches_profile_equation():
    # d/deta of Q along (phi, phi', phi'') equals 2 phi' phi^(-2a-1) times the ODE residual
    spec = PowerLaw(1.5, 0.9, 0.4)
    fi = first_integral(spec, 0.0)
    ode = reduce_to_ode(spec, WaveFrame())
    phi, dphi = 0.8, 0.35
    ddphi = ode.second_derivative(phi, dphi)
    h = 1e-6
    q_plus = fi.invariant(phi + h * dphi + 0.5 * h * h * ddphi, dphi + h * ddphi)
    q_minus = fi.invariant(phi - h * dphi + 0.5 * h * h * ddphi, dphi - h * ddphi)
    assert abs((q_plus - q_minus) / (2 * h)) < 1e-6


# --- p_transform ---------------------------------------------------------------


def test_p_transform_identity():
    spec = PowerLaw(2.0, 3.0, 2.0)
    assert p_transform(spec, 1.0) == spec


def test_p_transform_linearizes_quasilinear_bell():
    b = 2.0 * math.pi
    assert p_transform(PowerLaw(2.0, b, 2.0), -1.0) == PowerLaw(0.0, -b, 0.0)


def test_p_transform_a_one_is_form_fixed():
    assert p_transform(PowerLaw(1.0, 4.0, 1.0), 2.0) == PowerLaw(1.0, 2.0, 1.0)


@pytest.mark.parametrize("a", [2.0, 1.5, 3.0, 0.3, -2.0, 5.0 / 3.0, 1.0 / 7.0])
def test_p_transform_semilinear_reduction_exact(a):
    assert p_transform(PowerLaw(a, 1.0, 2.0), 1.0 / (1.0 - a)).a == 0.0


@pytest.mark.parametrize("p", [0.0, math.inf])
def test_p_transform_rejects_bad_p(p):
    with pytest.raises(DomainError):
        p_transform(PowerLaw(2.0, 1.0, 2.0), p)


def test_p_transform_needs_power_law():
    with pytest.raises(UnsupportedFormError):
        p_transform(GeneralF(0.0, [PhiSinPhiTerm(1.0)]), 2.0)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0.1, max_value=5),
    st.floats(min_value=-3, max_value=3),
    st.sampled_from([-2.0, -1.0, -0.5, 0.5, 2.0, 3.0, 0.25]),
    st.sampled_from([-2.0, -1.0, -0.5, 0.5, 2.0, 3.0, 0.25]),
)
def test_p_transform_composition(a, b, n, p, q):
    lhs = p_transform(p_transform(PowerLaw(a, b, n), p), q)
    rhs = p_transform(PowerLaw(a, b, n), p * q)
    for x, y in ((lhs.a, rhs.a), (lhs.b, rhs.b), (lhs.n, rhs.n)):
        assert abs(x - y) <= 1e-13 * max(1.0, abs(y))


# --- boost_compose -------------------------------------------------------------


def test_boost_compose_examples():
    assert boost_compose(0.5, 0.5) == pytest.approx(0.8, abs=1e-15)
    assert boost_compose(0.0, 0.37) == 0.37
    assert boost_compose(0.42, -0.42) == 0.0


@settings(max_examples=200, deadline=None)
@given(unit_speed, unit_speed, unit_speed)
def test_boost_compose_associative_with_identity(u, v, w):
    left = boost_compose(boost_compose(u, v), w)
    right = boost_compose(u, boost_compose(v, w))
    assert abs(left - right) <= 1e-15 * 10
    assert abs(boost_compose(u, 0.0) - u) <= 1e-15
    assert -1.0 < left < 1.0


def test_boost_compose_rejects_luminal():
    with pytest.raises(FrameError):
        boost_compose(1.0, 0.2)


# --- dirac density ODE ---------------------------------------------------------


def test_dirac_rho_examples():
    rhs = dirac_rho_ode(DiracReduced(1.0, 1.0, 1))
    assert rhs(0.0, 0.5) == pytest.approx(-0.5, abs=1e-15)
    assert rhs(0.0, 1.0) == 0.0
    mb = dirac_rho_ode(DiracReduced(1.7, 2.0, 0))
    for rho in (0.1, 3.0, -2.0):
        assert mb(0.0, rho) == pytest.approx(-2 * 1.7 * rho, rel=1e-15)


def test_dirac_rho_needs_dirac_spec():
    with pytest.raises(UnsupportedFormError):
        dirac_rho_ode(PowerLaw(1.0, 1.0, 1.0))
