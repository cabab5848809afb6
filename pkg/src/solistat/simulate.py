"""Profile-ODE integration and 1+1D method-of-lines simulation.

The PDE is advanced as a first-order system in (phi, v = phi_t):

    phi_t = v
    v_t   = [phi D2(phi) - a D1(phi)^2 + a v^2 - F(phi)] / phi

with second-order central stencils D1, D2 and classic RK4 in time. For
``a = 0`` the division is done analytically, ``v_t = D2(phi) - F(phi)/phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .catalog import ClosedFormSolution
from .core import (
    GeneralF,
    PowerTerm,
    TravelingWaveODE,
    WaveFrame,
    canonicalize,
    eval_F,
    eval_F_over_phi,
    potential,
)
from .errors import DomainError, StabilityError, TrackingError, UnsupportedFormError
from .numkit import Samples1D, Tolerance, ode_solve_adaptive

__all__ = [
    "Periodic",
    "Dirichlet",
    "SimConfig",
    "GridState",
    "ProfileResult",
    "SimResult",
    "integrate_profile",
    "init_from_solution",
    "run",
    "measure_speed",
    "feature_positions",
    "energy",
    "shape_error",
]


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class Dirichlet:
    left: float
    right: float


Boundary = Union[Periodic, Dirichlet]


@dataclass(frozen=True)
class SimConfig:
    x_min: float = -40.0
    x_max: float = 40.0
    h: float = 0.05
    cfl: float = 0.5
    T: float = 20.0
    boundary: Boundary = field(default_factory=Periodic)
    floor: float = 1e-6
    snapshot_stride: int = 20

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise DomainError(f"h must be > 0, got {self.h}")
        if not self.x_max - self.x_min >= 16 * self.h:
            raise DomainError("domain must span at least 16 grid steps")
        if not 0 < self.cfl <= 1:
            raise DomainError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")
        if not self.floor >= 0:
            raise DomainError(f"floor must be >= 0, got {self.floor}")
        if int(self.snapshot_stride) < 1:
            raise DomainError("snapshot_stride must be a positive integer")

    @property
    def periodic(self) -> bool:
        return isinstance(self.boundary, Periodic)

    def nodes(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.h))
        # periodic grids omit the duplicated right end
        count = n if self.periodic else n + 1
        return self.x_min + self.h * np.arange(count)


@dataclass
class GridState:
    """Field snapshot on a uniform grid ``x_i = x0 + i h``."""

    x0: float
    h: float
    phi: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.phi.shape != self.v.shape or self.phi.ndim != 1:
            raise DomainError("phi and v must be 1-D arrays of equal length")
        if self.phi.size < 8:
            raise DomainError("GridState needs at least 8 nodes")
        if not (np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.v))):
            raise DomainError("GridState values must be finite")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.phi.size)

    def copy(self) -> "GridState":
        return GridState(self.x0, self.h, self.phi.copy(), self.v.copy(), self.t)


# ---------------------------------------------------------------------------
# profile ODE


@dataclass
class ProfileResult:
    samples: Samples1D
    second_derivative: np.ndarray
    stop_reason: str
    stop_eta: float

    @property
    def eta(self):
        return self.samples.grid

    @property
    def phi(self):
        return self.samples.values

    @property
    def dphi(self):
        return self.samples.derivative


def integrate_profile(
    ode: TravelingWaveODE,
    phi0: float,
    dphi0: float,
    span,
    tol: Tolerance = Tolerance(1e-10, 1e-10),
    floor: float = 1e-10,
    ceiling: float = 1e10,
    t_eval=None,
) -> ProfileResult:
    """Integrate ``phi'' = [a phi'^2 + F(phi)] / phi`` from ``(phi0, dphi0)``.

    For quasilinear members (a != 0 or fractional powers) integration stops
    when phi drops below ``floor``; any run stops once ``|phi|`` exceeds
    ``ceiling``. The reason is recorded on the result. Semilinear members use
    the term-wise expansion of F(phi)/phi, so phi may cross zero.
    """
    spec = ode.spec
    quasilinear = _is_quasilinear(spec)
    if phi0 == 0 and quasilinear:
        raise DomainError("phi0 = 0 is a singular starting point (division by phi)")
    a = ode.a

    if quasilinear:
        def rhs(eta, y):
            phi, dphi = y
            return np.array([dphi, (a * dphi * dphi + float(eval_F(spec, phi))) / phi])
    else:
        def rhs(eta, y):
            return np.array([y[1], float(eval_F_over_phi(spec, y[0]))])

    def stop(eta, y):
        if quasilinear and y[0] < floor:
            return f"phi below floor {floor:g}"
        if abs(y[0]) > ceiling:
            return f"|phi| above {ceiling:g}"
        return False

    res = ode_solve_adaptive(rhs, [phi0, dphi0], span, tol, stop=stop, t_eval=t_eval)
    samples = res.component(0, derivative=1)
    if quasilinear:
        ddphi = ode.second_derivative(samples.values, samples.derivative)
    else:
        ddphi = eval_F_over_phi(spec, samples.values)
    return ProfileResult(samples, np.asarray(ddphi, dtype=float), res.stop_reason, res.stop_t)


# ---------------------------------------------------------------------------
# PDE


def init_from_solution(sol: ClosedFormSolution, frame: WaveFrame, cfg: SimConfig) -> GridState:
    """Sample a traveling closed form at t = 0.

    ``phi_i = phi(eta_i)`` and ``v_i = -u gamma phi'(eta_i)`` since
    ``d eta / dt = -u gamma``.
    """
    if not isinstance(frame, WaveFrame):
        frame = WaveFrame(float(frame))
    x = cfg.nodes()
    eta = frame.eta(x, 0.0)
    try:
        phi, dphi, _ = sol.field(eta)
    except DomainError as exc:
        raise DomainError(f"initial window contains a singularity: {exc}") from None
    v = -frame.u * frame.gamma * dphi
    return GridState(float(x[0]), cfg.h, np.array(phi, dtype=float), np.array(v, dtype=float), 0.0)


def _is_quasilinear(spec: GeneralF) -> bool:
    if spec.a != 0.0:
        return True
    for term in spec.terms:
        if isinstance(term, PowerTerm):
            e = term.exponent - 1.0
            if e < 0 or e != int(e):
                return True
    return False


class _Stepper:
    def __init__(self, spec: GeneralF, cfg: SimConfig, h: float):
        self.spec = spec
        self.a = spec.a
        self.periodic = cfg.periodic
        self.h = h
        self.quasilinear = _is_quasilinear(spec)

    def _stencils(self, phi):
        h = self.h
        if self.periodic:
            right = np.roll(phi, -1)
            left = np.roll(phi, 1)
            return phi, (right - 2.0 * phi + left) / (h * h), (right - left) / (2.0 * h)
        c = phi[1:-1]
        d2 = (phi[2:] - 2.0 * c + phi[:-2]) / (h * h)
        d1 = (phi[2:] - phi[:-2]) / (2.0 * h)
        return c, d2, d1

    def rhs(self, phi, v):
        c, d2, d1 = self._stencils(phi)
        vv = v if self.periodic else v[1:-1]
        if self.a == 0.0 and not self.quasilinear:
            acc = d2 - eval_F_over_phi(self.spec, c)
        else:
            acc = (c * d2 - self.a * d1 * d1 + self.a * vv * vv - eval_F(self.spec, c)) / c
        if self.periodic:
            return v, acc
        dv = np.zeros_like(v)
        dv[1:-1] = acc
        dphi = v.copy()
        dphi[0] = dphi[-1] = 0.0
        return dphi, dv

    def step(self, phi, v, dt):
        k1p, k1v = self.rhs(phi, v)
        k2p, k2v = self.rhs(phi + 0.5 * dt * k1p, v + 0.5 * dt * k1v)
        k3p, k3v = self.rhs(phi + 0.5 * dt * k2p, v + 0.5 * dt * k2v)
        k4p, k4v = self.rhs(phi + dt * k3p, v + dt * k3v)
        phi_new = phi + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        v_new = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        return phi_new, v_new


@dataclass
class SimResult:
    snapshots: List[GridState]
    diagnostics: dict
    spec: GeneralF
    config: SimConfig

    @property
    def final(self) -> GridState:
        return self.snapshots[-1]


def run(spec, state: GridState, cfg: SimConfig) -> SimResult:
    """Advance ``state`` to ``t + cfg.T`` and collect snapshots.

    Snapshots are taken every ``cfg.snapshot_stride`` steps plus the final
    state. Dirichlet ends are pinned to the boundary values with zero
    velocity.

    Raises
    ------
    StabilityError
        On NaN/Inf or, for quasilinear specs, phi below ``cfg.floor``. The
        last good snapshot is attached.
    """
    canon = canonicalize(spec)
    if not math.isclose(state.h, cfg.h, rel_tol=1e-12):
        raise DomainError("state grid spacing differs from cfg.h")
    dt = cfg.cfl * cfg.h
    if dt > cfg.h:
        raise DomainError("CFL violated: dt > h")
    n_steps = int(math.ceil(cfg.T / dt - 1e-9))
    dt = cfg.T / n_steps
    stepper = _Stepper(canon, cfg, cfg.h)

    phi = state.phi.copy()
    v = state.v.copy()
    if isinstance(cfg.boundary, Dirichlet):
        phi[0], phi[-1] = cfg.boundary.left, cfg.boundary.right
        v[0] = v[-1] = 0.0
    if stepper.quasilinear and np.any(phi < cfg.floor):
        raise StabilityError("initial field is below the positivity floor", state.t, None)

    t0 = state.t
    snaps = [GridState(state.x0, state.h, phi.copy(), v.copy(), t0)]
    stride = int(cfg.snapshot_stride)
    for k in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            phi, v = stepper.step(phi, v, dt)
        t = t0 + k * dt
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(v))):
            raise StabilityError(f"non-finite field at t={t:.6g}", t, snaps[-1])
        if stepper.quasilinear and np.any(phi < cfg.floor):
            i = int(np.argmax(phi < cfg.floor))
            raise StabilityError(
                f"phi fell below floor {cfg.floor:g} at x={state.x0 + i * state.h:.6g}, t={t:.6g}",
                t,
                snaps[-1],
            )
        if k % stride == 0 or k == n_steps:
            snaps.append(GridState(state.x0, state.h, phi.copy(), v.copy(), t))

    diagnostics = {"steps": n_steps, "dt": dt, "nodes": int(phi.size), "quasilinear": stepper.quasilinear}
    if canon.a == 0.0 and not stepper.quasilinear:
        e0 = energy(snaps[0], canon, periodic=cfg.periodic)
        e1 = energy(snaps[-1], canon, periodic=cfg.periodic)
        diagnostics["energy_initial"] = e0
        diagnostics["energy_final"] = e1
        diagnostics["energy_drift_rel"] = abs(e1 - e0) / max(abs(e0), 1e-300)
    return SimResult(snaps, diagnostics, canon, cfg)


def energy(state: GridState, spec, periodic: bool = False, vacuum: Optional[float] = None) -> float:
    """Discrete energy ``sum h [v^2/2 + D1(phi)^2/2 + V(phi) - V(vacuum)]``.

    ``V`` is the antiderivative of ``F(phi)/phi``; ``vacuum`` defaults to the
    leftmost node value. Only semilinear (a = 0) members have this energy.
    With non-periodic ends the sum runs over interior nodes.
    """
    canon = canonicalize(spec)
    if canon.a != 0.0:
        raise UnsupportedFormError("energy is defined only for the semilinear family (a = 0)")
    phi, v, h = state.phi, state.v, state.h
    vac = phi[0] if vacuum is None else vacuum
    if periodic:
        d1 = (np.roll(phi, -1) - np.roll(phi, 1)) / (2.0 * h)
        c, vv = phi, v
    else:
        d1 = (phi[2:] - phi[:-2]) / (2.0 * h)
        c, vv = phi[1:-1], v[1:-1]
    V = potential(canon, c) - float(potential(canon, np.array(vac)))
    density = 0.5 * vv * vv + 0.5 * d1 * d1 + V
    return float(h * math.fsum(density))


def shape_error(state: GridState, sol: ClosedFormSolution, frame: WaveFrame) -> float:
    """L-infinity distance between a snapshot and the closed form at its time."""
    eta = frame.eta(state.x, state.t)
    ref = sol.field(eta)[0]
    return float(np.max(np.abs(state.phi - ref)))


def _kink_position(state: GridState, level: float) -> float:
    d = state.phi - level
    idx = np.nonzero(np.signbit(d[:-1]) != np.signbit(d[1:]))[0]
    if idx.size == 0:
        raise TrackingError(f"no level crossing at t={state.t:g}")
    if idx.size > 1:
        # several crossings: keep the one with the steepest jump
        idx = idx[[int(np.argmax(np.abs(d[idx + 1] - d[idx])))]]
    i = int(idx[0])
    frac = d[i] / (d[i] - d[i + 1])
    return state.x0 + (i + frac) * state.h


def _peak_position(state: GridState) -> float:
    i = int(np.argmax(state.phi))
    if i == 0 or i == state.phi.size - 1:
        raise TrackingError(f"peak reached the boundary at t={state.t:g}")
    ym, y0, yp = state.phi[i - 1], state.phi[i], state.phi[i + 1]
    denom = ym - 2.0 * y0 + yp
    offset = 0.0 if denom == 0 else 0.5 * (ym - yp) / denom
    return state.x0 + (i + offset) * state.h


def feature_positions(snapshots, feature: str = "auto", level: Optional[float] = None):
    """Tracked feature location for every snapshot.

    ``feature`` is ``"kink"`` (linear level crossing, default level = mean of
    the end values), ``"bell"`` (vertex of the parabola through the three
    highest nodes) or ``"auto"``.
    """
    first = snapshots[0]
    if feature == "auto":
        spread = float(np.max(first.phi) - np.min(first.phi))
        feature = "kink" if abs(first.phi[-1] - first.phi[0]) > 0.5 * spread else "bell"
    if feature == "kink":
        lvl = 0.5 * (first.phi[0] + first.phi[-1]) if level is None else level
        return np.array([_kink_position(s, lvl) for s in snapshots])
    if feature == "bell":
        return np.array([_peak_position(s) for s in snapshots])
    raise DomainError(f"unknown feature {feature!r}")


def measure_speed(snapshots, feature: str = "auto", level: Optional[float] = None) -> float:
    """Least-squares propagation speed of the tracked feature."""
    if len(snapshots) < 3:
        raise DomainError("measure_speed needs at least 3 snapshots")
    pos = feature_positions(snapshots, feature, level)
    t = np.array([s.t for s in snapshots])
    return float(np.polyfit(t, pos, 1)[0])
