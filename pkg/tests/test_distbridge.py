import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solistat.catalog import BEProfileSq, ExpProfile, QuantumRho, RationalBell, asymptotic_decay
from solistat.core import DiracReduced, PowerLaw
from solistat.distbridge import (
    BoseEinstein,
    Cauchy,
    Exponential,
    FermiDirac,
    MaxwellBoltzmann,
    Normal,
    StudentT,
    equivalence_report,
    from_dict,
    normalization,
    pdf,
    soliton_for,
    to_dict,
    to_soliton,
)
from solistat.errors import DivergenceError, DomainError

WIDE = np.linspace(-20.0, 20.0, 1001)


def test_textbook_values():
    assert pdf(Cauchy(), 0.0) == pytest.approx(1.0 / math.pi, abs=1e-16)
    assert pdf(Normal(), 0.0) == pytest.approx(0.3989422804014327, abs=1e-16)
    x = np.linspace(-7, 7, 29)
    np.testing.assert_allclose(pdf(StudentT(1.0), x), pdf(Cauchy(), x), rtol=1e-14)


def test_student_t3_closed_form():
    # t3 density 6 sqrt(3) / (pi (3 + x^2)^2)
    x = np.linspace(-5, 5, 21)
    ref = 6.0 * math.sqrt(3.0) / (math.pi * (3.0 + x * x) ** 2)
    np.testing.assert_allclose(pdf(StudentT(3.0), x), ref, rtol=1e-13)


def test_student_t_tends_to_normal():
    x = np.linspace(-5, 5, 201)
    assert np.max(np.abs(pdf(StudentT(200.0), x) - pdf(Normal(), x))) < 2e-3


def test_large_nu_stays_finite():
    assert math.isfinite(pdf(StudentT(1e6), 0.0))


@pytest.mark.parametrize(
    "dist", [Cauchy(1.0, 2.0), Normal(-1.0, 0.5), StudentT(2.5), Exponential(3.0), FermiDirac(1.0, 2.0), MaxwellBoltzmann(0.5, 2.0)]
)
def test_pdf_nonnegative_finite(dist):
    x = np.linspace(0.0 if isinstance(dist, Exponential) else -30.0, 30.0, 301)
    vals = pdf(dist, x)
    assert np.all(np.isfinite(vals)) and np.all(vals >= 0)


def test_support_errors():
    with pytest.raises(DomainError):
        pdf(Exponential(1.0), -0.1)
    with pytest.raises(DomainError):
        pdf(BoseEinstein(), 0.0)


@pytest.mark.parametrize("make", [lambda: Cauchy(0, 0), lambda: Normal(0, -1), lambda: StudentT(0), lambda: Exponential(math.inf)])
def test_parameter_positivity(make):
    with pytest.raises(DomainError):
        make()


def test_dict_round_trip():
    for d in (Cauchy(0.5, 2.0), Normal(), StudentT(3.0), Exponential(2.0), FermiDirac(), BoseEinstein(), MaxwellBoltzmann()):
        assert from_dict(to_dict(d)) == d
    assert from_dict({"dist": "cauchy", "lambda": 3.0}) == Cauchy(0.0, 3.0)
    with pytest.raises(DomainError):
        from_dict({"dist": "gamma"})


# --- maps -----------------------------------------------------------------------


def test_cauchy_map():
    spec, C1, C2 = to_soliton(Cauchy())
    assert spec == PowerLaw(2.0, 2.0 * math.pi, 2.0)
    assert C1 == pytest.approx(-4.0 * math.pi ** 2)
    assert C2 == 0.0


def test_normal_map_constant():
    spec, C1, C2 = to_soliton(Normal())
    assert spec == PowerLaw(1.0, 1.0, 1.0)
    assert C1 == pytest.approx(-math.log(2.0 * math.pi), abs=1e-15)
    assert C1 == pytest.approx(-1.83787707, abs=1e-8)


@pytest.mark.parametrize("dist", [Cauchy(), Cauchy(1.5, 0.7), Normal(), Normal(2.0, 1.7), StudentT(1.0), StudentT(3.0), StudentT(5.0), StudentT(2.5)])
def test_round_trip_pointwise(dist):
    sol = soliton_for(dist)
    rep = equivalence_report(dist, sol, WIDE)
    assert rep.max_abs < 1e-12, rep
    assert rep.passed


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=0.2, max_value=5))
def test_round_trip_property(mu, scale):
    for dist in (Cauchy(mu, scale), Normal(mu, scale)):
        rep = equivalence_report(dist, soliton_for(dist), WIDE)
        assert rep.max_abs < 1e-12


def test_legacy_normal_constant_fails_at_mode():
    rep = equivalence_report(Normal(), soliton_for(Normal(), paper_constants=True), WIDE)
    expected = (2.0 * math.pi) ** -0.25 - (2.0 * math.pi) ** -0.5
    assert rep.max_abs == pytest.approx(expected, abs=1e-12)
    assert abs(rep.max_abs - 0.23) <= 0.01
    assert rep.argmax == 0.0
    assert not rep.passed


def test_exponential_map():
    sol = soliton_for(Exponential(2.0))
    assert isinstance(sol, ExpProfile)
    assert sol.C0 == pytest.approx(2.0) and sol.c == pytest.approx(2.0)
    rep = equivalence_report(Exponential(2.0), sol, np.linspace(0, 20, 401))
    assert rep.max_abs < 1e-12


def test_quantum_maps():
    assert to_soliton(FermiDirac(1.0, 2.0))[0] == DiracReduced(1.0, 2.0, 1)
    assert to_soliton(BoseEinstein(1.0, 2.0))[0] == DiracReduced(1.0, 2.0, -1)
    assert to_soliton(MaxwellBoltzmann(1.0, 3.0))[0].n_stat == 0
    for dist, grid in (
        (FermiDirac(1.0, 2.0), np.linspace(-5, 5, 101)),
        (BoseEinstein(1.0, 2.0), np.linspace(0.05, 5, 101)),
        (MaxwellBoltzmann(0.7, 3.0), np.linspace(-2, 5, 101)),
    ):
        sol = soliton_for(dist)
        assert isinstance(sol, QuantumRho)
        assert equivalence_report(dist, sol, grid).max_abs < 1e-12


def test_equivalence_empty_grid():
    with pytest.raises(DomainError):
        equivalence_report(Cauchy(), soliton_for(Cauchy()), [])


def test_occupation_limits():
    fd = soliton_for(FermiDirac(1.0, 2.0))
    assert fd.limits() == (0.5, 0.0)
    assert asymptotic_decay(fd) == (False, True)
    mb = soliton_for(MaxwellBoltzmann(1.0, 3.0))
    eta = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(mb.evaluate(eta)[0], 3.0 * np.exp(-2.0 * eta), rtol=1e-14)
    be = soliton_for(BoseEinstein(1.0, 1.0))
    assert be.pole == 0.0
    assert not be.domain().contains(0.0)


# --- normalization ----------------------------------------------------------------


@pytest.mark.parametrize("dist", [Cauchy(), Normal(), StudentT(3.0), StudentT(5.0), Cauchy(2.0, 0.3)])
def test_normalization_of_mapped_profiles(dist):
    assert normalization(soliton_for(dist)) == pytest.approx(1.0, abs=1e-6)
    assert normalization(dist) == pytest.approx(1.0, abs=1e-6)


def test_normalization_exponential():
    assert normalization(ExpProfile(2.5, 2.5)) == pytest.approx(1.0, abs=1e-8)
    assert normalization(Exponential(0.4)) == pytest.approx(1.0, abs=1e-8)


def test_normalization_refuses_divergent():
    with pytest.raises(DivergenceError):
        normalization(BoseEinstein())
    with pytest.raises(DivergenceError):
        normalization(BEProfileSq(1.0, 2.0, 0.0))
    with pytest.raises(DivergenceError):
        normalization(RationalBell(2.0, 4.0, 0.0))
