import math

import numpy as np
import pytest

from solistat.catalog import GaussBell, Logistic, RationalBell, SechPulse, SGKink, TanhKink
from solistat.core import GeneralF, PhiSinPhiTerm, PowerLaw, PowerTerm, WaveFrame, reduce_to_ode
from solistat.errors import DomainError, StabilityError, TrackingError, UnsupportedFormError
from solistat.numkit import Tolerance
from solistat.simulate import (
    Dirichlet,
    GridState,
    Periodic,
    SimConfig,
    energy,
    init_from_solution,
    integrate_profile,
    measure_speed,
    run,
    shape_error,
)
from solistat.verify import conserved_quantity_drift

KINK = TanhKink(-1.0, -1.0, 0.0)
CAUCHY = RationalBell(2.0 * math.pi, -4.0 * math.pi ** 2, 0.0)
CAUCHY_SPEC = PowerLaw(2.0, 2.0 * math.pi, 2.0)


def _ends(state):
    return Dirichlet(float(state.phi[0]), float(state.phi[-1]))


def kink_run(u, h=0.05, T=20.0):
    frame = WaveFrame(u)
    base = SimConfig(h=h, T=T, snapshot_stride=max(1, int(round(0.5 / (0.5 * h)))))
    state = init_from_solution(KINK, frame, base)
    cfg = SimConfig(h=h, T=T, boundary=_ends(state), snapshot_stride=base.snapshot_stride)
    return run(KINK.spec, state, cfg), frame


@pytest.fixture(scope="module")
def kink_runs():
    return {(u, h): kink_run(u, h) for u in (0.0, 0.3, 0.5) for h in (0.05, 0.025)}


# --- configuration ------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [dict(h=0.0), dict(x_min=0.0, x_max=0.5, h=0.05), dict(cfl=1.5), dict(T=0.0), dict(floor=-1.0), dict(snapshot_stride=0)],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        SimConfig(**kwargs)


def test_grid_state_validation():
    with pytest.raises(DomainError):
        GridState(0.0, 0.1, np.zeros(5), np.zeros(5))
    with pytest.raises(DomainError):
        GridState(0.0, 0.1, np.full(8, np.nan), np.zeros(8))


def test_node_counts():
    assert SimConfig(x_min=-1, x_max=1, h=0.1).nodes().size == 20
    assert SimConfig(x_min=-1, x_max=1, h=0.1, boundary=Dirichlet(0, 0)).nodes().size == 21


# --- profile ODE ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "sol, phi0",
    [(CAUCHY, 1.0 / math.pi), (GaussBell(1.0, -math.log(2 * math.pi), 0.0), 1.0 / math.sqrt(2 * math.pi))],
)
def test_integrate_from_peak_matches_closed_form(sol, phi0):
    ode = reduce_to_ode(sol.spec, WaveFrame())
    res = integrate_profile(ode, phi0, 0.0, (0.0, 5.0), Tolerance(1e-10, 1e-10), t_eval=np.linspace(0, 5, 101))
    assert res.stop_reason == "span_end"
    err = np.max(np.abs(res.phi - sol.evaluate(res.eta)[0]))
    assert err < 1e-6


def test_integrated_cauchy_keeps_invariant():
    ode = reduce_to_ode(CAUCHY_SPEC, WaveFrame())
    res = integrate_profile(ode, 1.0 / math.pi, 0.0, (0.0, 5.0), Tolerance(1e-30, 1e-12), t_eval=np.linspace(0, 5, 201))
    assert conserved_quantity_drift(CAUCHY_SPEC, res.samples) < 1e-8
    q0 = res.dphi[0] ** 2 * res.phi[0] ** -4 - 4.0 * math.pi / res.phi[0]
    assert q0 == pytest.approx(-4.0 * math.pi ** 2, abs=1e-6)


def test_logistic_equilibrium_is_constant():
    sol = Logistic(1.0, 1.0, 0.0)
    ode = reduce_to_ode(sol.spec, WaveFrame())
    res = integrate_profile(ode, 0.5, 0.0, (0.0, 10.0), t_eval=np.linspace(0, 10, 11))
    assert np.all(res.phi == 0.5)


def test_kink_profile_crosses_zero():
    ode = reduce_to_ode(KINK.spec, WaveFrame())
    v, d, _ = KINK.evaluate(-5.0)
    res = integrate_profile(ode, v, d, (-5.0, 5.0), Tolerance(1e-12, 1e-12), t_eval=np.linspace(-5, 5, 41))
    assert res.stop_reason == "span_end"
    assert np.max(np.abs(res.phi - KINK.evaluate(res.eta)[0])) < 1e-8


def test_profile_floor_stop_and_singular_start():
    ode = reduce_to_ode(CAUCHY_SPEC, WaveFrame())
    res = integrate_profile(ode, 1.0 / math.pi, 0.0, (0.0, 1e6), floor=1e-3)
    assert "floor" in res.stop_reason
    assert res.phi[-1] >= 1e-3
    with pytest.raises(DomainError):
        integrate_profile(ode, 0.0, 1.0, (0.0, 1.0))


# --- initial data -----------------------------------------------------------------------


def test_init_static_has_zero_velocity():
    st = init_from_solution(KINK, WaveFrame(0.0), SimConfig())
    assert np.all(st.v == 0.0)
    np.testing.assert_allclose(st.phi, KINK.evaluate(st.x)[0], rtol=0, atol=0)


def test_init_moving_velocity_chain_rule():
    u = 0.5
    st = init_from_solution(KINK, WaveFrame(u), SimConfig())
    gamma = 1.0 / math.sqrt(1 - u * u)
    np.testing.assert_allclose(st.v, -u * gamma * KINK.evaluate(st.x * gamma)[1], rtol=1e-15)


def test_init_contracts_moving_pulse():
    pulse = SechPulse(1.0, 2.0, 0.0)
    cfg = SimConfig(x_min=-20, x_max=20, h=0.01)
    width = lambda st: np.sum(st.phi > 0.5) * st.h
    ratio = width(init_from_solution(pulse, WaveFrame(0.9), cfg)) / width(init_from_solution(pulse, WaveFrame(0.0), cfg))
    assert ratio == pytest.approx(math.sqrt(1 - 0.81), rel=0.02)


def test_init_rejects_singular_window():
    with pytest.raises(DomainError):
        init_from_solution(RationalBell(2.0, 4.0, 0.0), WaveFrame(0.0), SimConfig(x_min=-2, x_max=2, h=0.1))


# --- PDE runs ------------------------------------------------------------------------------


def test_static_kink_is_stationary(kink_runs):
    res, _ = kink_runs[(0.0, 0.05)]
    drift = np.max(np.abs(res.final.phi - res.snapshots[0].phi))
    assert drift < 1e-3


@pytest.mark.parametrize("u", [0.0, 0.3, 0.5])
def test_traveling_kink_fidelity_and_refinement(kink_runs, u):
    coarse, frame = kink_runs[(u, 0.05)]
    fine, _ = kink_runs[(u, 0.025)]
    e_coarse = shape_error(coarse.final, KINK, frame)
    e_fine = shape_error(fine.final, KINK, frame)
    assert e_coarse < 5e-3
    assert e_coarse / e_fine >= 3.0
    assert abs(measure_speed(coarse.snapshots) - u) < 5e-3


def test_kink_energy_drift(kink_runs):
    res, _ = kink_runs[(0.5, 0.05)]
    assert res.diagnostics["energy_drift_rel"] < 1e-4


def test_negative_speed():
    res, _ = kink_run(-0.3, T=10.0)
    assert measure_speed(res.snapshots) == pytest.approx(-0.3, abs=5e-3)


def test_static_bell_speed():
    pulse = SechPulse(1.0, 2.0, 0.0)
    cfg = SimConfig(T=5.0)
    res = run(pulse.spec, init_from_solution(pulse, WaveFrame(0.0), cfg), cfg)
    assert abs(measure_speed(res.snapshots, "bell")) < 1e-3


def test_zero_field_stays_zero():
    spec = GeneralF(0.0, [PowerTerm(-1.0, 2.0), PowerTerm(1.0, 4.0)])
    cfg = SimConfig(x_min=-5, x_max=5, h=0.1, T=2.0, boundary=Dirichlet(0.0, 0.0))
    n = cfg.nodes().size
    res = run(spec, GridState(-5.0, 0.1, np.zeros(n), np.zeros(n)), cfg)
    assert all(np.all(s.phi == 0.0) and np.all(s.v == 0.0) for s in res.snapshots)


def test_kink_energy_value():
    st = init_from_solution(KINK, WaveFrame(0.0), SimConfig())
    assert energy(st, KINK.spec) == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, abs=1e-2)
    vac = GridState(0.0, 0.05, np.ones(32), np.zeros(32))
    assert energy(vac, KINK.spec) == 0.0


def test_energy_quasilinear_unsupported():
    st = GridState(0.0, 0.1, np.ones(10), np.zeros(10))
    with pytest.raises(UnsupportedFormError):
        energy(st, CAUCHY_SPEC)


def test_sine_gordon_periodic_energy():
    sg = GeneralF(0.0, [PhiSinPhiTerm(1.0)])
    pulse_cfg = SimConfig(x_min=-30, x_max=30, T=10.0)
    kink = SGKink(0.0)
    st = init_from_solution(kink, WaveFrame(0.3), pulse_cfg)
    cfg = SimConfig(x_min=-30, x_max=30, T=10.0, boundary=_ends(st))
    res = run(sg, st, cfg)
    assert res.diagnostics["energy_drift_rel"] < 1e-4
    assert measure_speed(res.snapshots, "kink", level=math.pi) == pytest.approx(0.3, abs=5e-3)


def test_runs_are_bit_identical():
    a, _ = kink_run(0.3, T=2.0)
    b, _ = kink_run(0.3, T=2.0)
    assert len(a.snapshots) == len(b.snapshots)
    for s, t in zip(a.snapshots, b.snapshots):
        assert s.t == t.t
        assert np.array_equal(s.phi, t.phi) and np.array_equal(s.v, t.v)


def test_stability_error_on_blowup():
    spec = GeneralF(0.0, [PowerTerm(-50.0, 3.0)])  # phi_tt = phi_xx + 50 phi^2
    cfg = SimConfig(x_min=-5, x_max=5, h=0.1, T=50.0, boundary=Periodic())
    n = cfg.nodes().size
    with pytest.raises(StabilityError) as info:
        run(spec, GridState(-5.0, 0.1, np.ones(n), np.zeros(n)), cfg)
    assert info.value.last_good is not None and info.value.t > 0


def test_quasilinear_below_floor_rejected():
    cfg = SimConfig(x_min=-5, x_max=5, h=0.1, T=1.0)
    n = cfg.nodes().size
    with pytest.raises(StabilityError):
        run(CAUCHY_SPEC, GridState(-5.0, 0.1, np.full(n, 1e-9), np.zeros(n)), cfg)


def test_tracking_error_when_feature_missing():
    x = np.linspace(-5, 5, 21)
    flat = [GridState(-5.0, 0.5, -np.ones(21), np.zeros(21), t) for t in (0.0, 1.0, 2.0)]
    with pytest.raises(TrackingError):
        measure_speed(flat, "kink", level=0.0)
    edge = [GridState(-5.0, 0.5, np.exp(x), np.zeros(21), t) for t in (0.0, 1.0, 2.0)]
    with pytest.raises(TrackingError):
        measure_speed(edge, "bell")
    with pytest.raises(DomainError):
        measure_speed(flat[:2], "kink")


# --- quasilinear bell ------------------------------------------------------------------------


def _peak(state):
    return float(np.max(state.phi))


@pytest.mark.xfail(strict=True, raises=StabilityError, reason="floor-pinned ends inject a 1/floor step into the linearised problem")
def test_quasilinear_bell_with_floor_boundaries():
    floor = 1e-6
    cfg = SimConfig(T=10.0, floor=floor, boundary=Dirichlet(floor, floor))
    st = init_from_solution(CAUCHY, WaveFrame(0.0), cfg)
    res = run(CAUCHY_SPEC, st, cfg)
    assert abs(_peak(res.final) / _peak(st) - 1.0) < 0.01


def test_quasilinear_bell_with_far_field_boundaries():
    base = SimConfig(h=0.0125, T=10.0, floor=1e-6, snapshot_stride=400)
    st = init_from_solution(CAUCHY, WaveFrame(0.0), base)
    cfg = SimConfig(h=0.0125, T=10.0, floor=1e-6, snapshot_stride=400, boundary=_ends(st))
    res = run(CAUCHY_SPEC, st, cfg)
    assert res.diagnostics["quasilinear"]
    assert abs(_peak(res.final) / _peak(st) - 1.0) < 0.01
