"""Residual engines: what it means for a profile to solve an equation.

All analytic checks use the catalog's closed-form derivatives. The PDE check
is the only finite-difference path and is judged by its convergence order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .catalog import ClosedFormSolution
from .core import (
    DiracReduced,
    FirstIntegral,
    PowerAntiderivative,
    PowerLaw,
    WaveFrame,
    boost_compose,
    canonicalize,
    dirac_rho_ode,
    eval_F,
    first_integral,
    p_transform,
)
from .errors import BranchError, DomainError, UnsupportedFormError
from .numkit import Samples1D

__all__ = [
    "ResidualReport",
    "ConvergenceResult",
    "profile_residual",
    "ode_residual",
    "first_order_residual",
    "pde_residual",
    "conserved_quantity_drift",
    "check_p_transform",
    "lorentz_profile_check",
    "convergence_order",
    "default_grid2d",
    "invariant_along",
]

EPS_SCALE = 1e-300
PRECISION_FLOOR = 1e-13


@dataclass(frozen=True)
class ResidualReport:
    """Summary of a residual check; ``passed`` iff ``max_rel < tolerance``."""

    check: str
    max_abs: float
    max_rel: float
    argmax: object
    grid: str
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_rel < self.tolerance)

    def to_dict(self) -> dict:
        argmax = self.argmax
        if isinstance(argmax, tuple):
            argmax = list(argmax)
        return {
            "name": self.check,
            "max_abs": self.max_abs,
            "max_rel": self.max_rel,
            "argmax": argmax,
            "grid": self.grid,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _report(check, residual, scale, where, grid_desc, tolerance):
    residual = np.abs(np.asarray(residual, dtype=float)).reshape(-1)
    rel = residual / (np.asarray(scale, dtype=float).reshape(-1) + EPS_SCALE)
    if not np.all(np.isfinite(rel)):
        i = int(np.argmax(~np.isfinite(rel)))
        return ResidualReport(check, math.inf, math.inf, where(i), grid_desc, tolerance)
    i = int(np.argmax(rel))
    return ResidualReport(
        check, float(np.max(residual)), float(rel[i]), where(i), grid_desc, float(tolerance)
    )


def _describe(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return "empty"
    return f"{grid.size} points on [{grid.min():.6g}, {grid.max():.6g}]"


def _grid_for(sol, grid):
    if grid is None:
        return sol.domain().grid()
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise DomainError("residual grid is empty")
    return grid


def profile_residual(spec, phi, dphi, ddphi):
    """Residual ``phi phi'' - a phi'^2 - F(phi)`` and its term-magnitude scale."""
    canon = canonicalize(spec)
    a = canon.a
    F = eval_F(canon, phi)
    lhs = phi * ddphi
    quad = a * dphi * dphi
    return lhs - quad - F, np.abs(lhs) + np.abs(quad) + np.abs(F)


def _rho_residual(spec: DiracReduced, rho, drho):
    rhs = dirac_rho_ode(spec)
    quad = 2.0 * spec.n_stat * spec.b * rho * rho
    lin = 2.0 * spec.m * rho
    return drho - rhs(None, rho), np.abs(drho) + np.abs(quad) + np.abs(lin)


def ode_residual(
    sol: ClosedFormSolution,
    spec=None,
    grid=None,
    tolerance: float = 1e-9,
) -> ResidualReport:
    """Substitute the analytic profile into an equation.

    ``spec`` defaults to the equation stored with ``sol``. For a
    ``DiracReduced`` spec the first-order density equation is checked with
    ``rho`` = the stored value; otherwise ``phi phi'' - a phi'^2 - F(phi)``
    is evaluated, taking ``phi = sqrt(rho)`` for entries that store a density.
    """
    spec = sol.spec if spec is None else spec
    grid = _grid_for(sol, grid)
    if isinstance(spec, DiracReduced):
        rho, drho, _ = sol.evaluate(grid)
        res, scale = _rho_residual(spec, rho, drho)
    else:
        phi, dphi, ddphi = sol.field(grid)
        res, scale = profile_residual(spec, phi, dphi, ddphi)
    return _report("ode_residual", res, scale, lambda i: float(grid[i]), _describe(grid), tolerance)


def _needs_positive(fi: FirstIntegral):
    if float(fi.a) != int(fi.a):
        return True
    return any(
        isinstance(t, PowerAntiderivative) and (t.power != int(t.power) or t.power < 0)
        for t in fi.terms
    )


def first_order_residual(
    sol: ClosedFormSolution,
    fi: Optional[FirstIntegral] = None,
    grid=None,
    tolerance: float = 1e-9,
) -> ResidualReport:
    """Check ``(phi')^2 = phi^(2a) (G(phi) + C)`` pointwise.

    Squaring makes the check blind to the sign of phi', so both branches of
    the square root are accepted. ``fi`` defaults to the first integral of
    ``sol.spec`` with the entry's own constant. For density entries the
    relation is checked for ``phi = sqrt(rho)``, which is equivalent to the
    Bernoulli equation ``rho' = 2 m rho (1 + alpha rho / (4 m^2))``.

    Raises
    ------
    BranchError
        Where ``G(phi) + C`` is negative beyond round-off.
    """
    if isinstance(sol.spec, DiracReduced):
        raise UnsupportedFormError("density entries of the Dirac family are already first order")
    if fi is None:
        fi = first_integral(sol.spec, sol.integration_constant or 0.0)
    grid = _grid_for(sol, grid)
    phi, dphi, _ = sol.field(grid)
    if _needs_positive(fi) and np.any(phi <= 0):
        i = int(np.argmax(phi <= 0))
        raise DomainError(f"phi <= 0 at eta={grid[i]:.17g} with fractional powers")
    G = fi.G(phi)
    bracket = G + fi.C
    g_scale = fi.G_magnitude(phi) + abs(fi.C)
    bad = bracket < -1e-12 * (g_scale + 1.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BranchError(
            f"G(phi) + C = {bracket[i]:.3e} < 0 at eta={grid[i]:.17g} (imaginary branch)",
            float(grid[i]),
        )
    weight = np.power(phi, 2.0 * fi.a)
    lhs = dphi * dphi
    res = lhs - weight * bracket
    scale = np.abs(lhs) + np.abs(weight) * g_scale
    return _report(
        "first_order_residual", res, scale, lambda i: float(grid[i]), _describe(grid), tolerance
    )


def default_grid2d():
    return np.linspace(-4.0, 4.0, 33), np.linspace(0.0, 1.0, 3)


def pde_residual(
    sol: ClosedFormSolution,
    frame: WaveFrame,
    spec=None,
    grid2d=None,
    h: float = 1e-3,
    tolerance: float = 1e-4,
) -> ResidualReport:
    """Full PDE residual of the traveling field ``phi(eta(x, t))``.

    All four derivatives come from second-order central differences with
    step ``h`` in both x and t, so the residual is O(h^2).

    Raises
    ------
    DomainError
        If any stencil point falls outside the validity domain.
    """
    if not isinstance(frame, WaveFrame):
        frame = WaveFrame(float(frame))
    if not h > 0:
        raise DomainError(f"step h must be > 0, got {h!r}")
    spec = sol.spec if spec is None else spec
    if isinstance(spec, DiracReduced):
        raise UnsupportedFormError("pde_residual needs a wave-equation spec")
    canon = canonicalize(spec)
    xs, ts = default_grid2d() if grid2d is None else grid2d
    X, T = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")

    def phi_at(x, t):
        eta = frame.eta(x, t)
        try:
            sol.domain().check(eta)
        except DomainError as exc:
            raise DomainError(f"pde stencil crosses a singularity: {exc}") from None
        return sol.field(eta, check=False)[0]

    etas = [frame.eta(X + dx, T + dt) for dx, dt in ((0, 0), (h, 0), (-h, 0), (0, h), (0, -h))]
    lo, hi = np.minimum.reduce(etas), np.maximum.reduce(etas)
    for sing in sol.domain().singularities:
        inside = (lo <= sing) & (sing <= hi)
        if np.any(inside):
            i = int(np.argmax(inside.reshape(-1)))
            raise DomainError(
                f"pde stencil at (x, t) = ({X.reshape(-1)[i]:.6g}, {T.reshape(-1)[i]:.6g}) "
                f"crosses the singularity at eta={sing:.17g}"
            )

    c = phi_at(X, T)
    xp, xm = phi_at(X + h, T), phi_at(X - h, T)
    tp, tm = phi_at(X, T + h), phi_at(X, T - h)
    phi_xx = (xp - 2.0 * c + xm) / (h * h)
    phi_tt = (tp - 2.0 * c + tm) / (h * h)
    phi_x = (xp - xm) / (2.0 * h)
    phi_t = (tp - tm) / (2.0 * h)

    lhs = c * (phi_xx - phi_tt)
    quad = canon.a * (phi_x * phi_x - phi_t * phi_t)
    F = eval_F(canon, c)
    res = lhs - quad - F
    scale = np.abs(lhs) + np.abs(quad) + np.abs(F)
    flat_x, flat_t = X.reshape(-1), T.reshape(-1)
    desc = f"{X.shape[0]}x{X.shape[1]} (x, t) points, u={frame.u:g}, h={h:g}"
    return _report(
        "pde_residual", res, scale, lambda i: (float(flat_x[i]), float(flat_t[i])), desc, tolerance
    )


def conserved_quantity_drift(spec, trajectory: Samples1D, C: float = 0.0) -> float:
    """Max deviation of ``Q = phi'^2 phi^(-2a) - G(phi)`` from its initial value.

    Along any solution of the profile equation Q is constant (it equals the
    first-integral constant).
    """
    if trajectory.derivative is None:
        raise DomainError("trajectory must carry derivative samples")
    fi = first_integral(spec, C)
    phi = trajectory.values
    if _needs_positive(fi) and np.any(phi <= 0):
        raise DomainError("phi <= 0 along the trajectory with fractional powers")
    Q = fi.invariant(phi, trajectory.derivative)
    return float(np.max(np.abs(Q - Q[0]))) if Q.size else 0.0


def invariant_along(spec, trajectory: Samples1D) -> np.ndarray:
    """Q at every trajectory sample (see :func:`conserved_quantity_drift`)."""
    return first_integral(spec, 0.0).invariant(trajectory.values, trajectory.derivative)


def check_p_transform(
    spec: PowerLaw,
    sol: ClosedFormSolution,
    p: float,
    grid=None,
    tolerance: float = 1e-9,
) -> ResidualReport:
    """Check that ``y = phi**(1/p)`` solves ``p_transform(spec, p)``.

    Derivatives of y follow from the chain rule on the analytic derivatives
    of phi, so the check is exact up to round-off.
    """
    new_spec = p_transform(spec, p)
    grid = _grid_for(sol, grid)
    phi, dphi, ddphi = sol.field(grid)
    if np.any(phi <= 0):
        i = int(np.argmax(phi <= 0))
        raise DomainError(f"phi <= 0 at eta={grid[i]:.17g}; y = phi**(1/p) undefined")
    q = 1.0 / p
    y = np.power(phi, q)
    dy = q * np.power(phi, q - 1.0) * dphi
    ddy = q * (q - 1.0) * np.power(phi, q - 2.0) * dphi * dphi + q * np.power(phi, q - 1.0) * ddphi
    res, scale = profile_residual(new_spec, y, dy, ddy)
    return _report(
        f"p_transform(p={p:g})", res, scale, lambda i: float(grid[i]), _describe(grid), tolerance
    )


def lorentz_profile_check(
    sol: ClosedFormSolution,
    u: float,
    w: float,
    grid2d=None,
    tolerance: float = 1e-12,
) -> ResidualReport:
    """Compare a boosted traveling field with the one built at the composed speed.

    The field moving at ``u`` is evaluated at the Lorentz-transformed
    coordinates ``x' = g (x - w t)``, ``t' = g (t - w x)`` with
    ``g = 1/sqrt(1 - w^2)`` and compared with the field moving at
    ``boost_compose(u, w)`` in the original coordinates.
    """
    frame_u = WaveFrame(u)
    frame_w = WaveFrame(w)
    frame_c = WaveFrame(boost_compose(u, w))
    xs, ts = default_grid2d() if grid2d is None else grid2d
    X, T = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float), indexing="ij")
    g = frame_w.gamma
    Xp = g * (X - w * T)
    Tp = g * (T - w * X)
    boosted = sol.evaluate(frame_u.eta(Xp, Tp))[0]
    direct = sol.evaluate(frame_c.eta(X, T))[0]
    diff = np.abs(boosted - direct)
    scale = np.full(diff.shape, max(1.0, float(np.max(np.abs(direct)))))
    flat_x, flat_t = X.reshape(-1), T.reshape(-1)
    desc = f"{X.shape[0]}x{X.shape[1]} (x, t) points, u={u:g}, w={w:g}"
    return _report(
        "lorentz_profile",
        diff,
        scale,
        lambda i: (float(flat_x[i]), float(flat_t[i])),
        desc,
        tolerance,
    )


@dataclass(frozen=True)
class ConvergenceResult:
    """Observed order; ``slope`` is None when every level is at the precision floor."""

    slope: Optional[float]
    errors: tuple
    h_levels: tuple

    @property
    def at_floor(self) -> bool:
        return self.slope is None


def convergence_order(
    residual_fn: Callable[[float], float], h_levels: Sequence[float]
) -> ConvergenceResult:
    """Least-squares slope of ``log(error)`` against ``log(h)``.

    ``residual_fn(h)`` returns a max-abs error (or a :class:`ResidualReport`).
    If any level is at or below 1e-13 the error is at round-off and no slope
    is reported.
    """
    hs = [float(h) for h in h_levels]
    if len(hs) < 3:
        raise DomainError("convergence_order needs at least 3 step sizes")
    errs = []
    for h in hs:
        e = residual_fn(h)
        errs.append(float(e.max_abs if isinstance(e, ResidualReport) else e))
    if any(e <= PRECISION_FLOOR for e in errs):
        return ConvergenceResult(None, tuple(errs), tuple(hs))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return ConvergenceResult(slope, tuple(errs), tuple(hs))
