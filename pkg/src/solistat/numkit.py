"""Double-precision numerical kernels.

Log-gamma, adaptive quadrature (finite and infinite ranges), a central
second-difference stencil and an embedded Dormand-Prince 5(4) integrator
with dense output. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AccuracyError, DomainError, IntegrationError

__all__ = [
    "Tolerance",
    "Samples1D",
    "ODEResult",
    "lgamma",
    "integrate_adaptive",
    "integrate_real_line",
    "integrate_half_line",
    "fd_second_derivative",
    "ode_solve_adaptive",
]


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be finite and > 0, got {val!r}")

    def bound(self, scale: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(scale))


@dataclass(frozen=True)
class Samples1D:
    """Values (and optionally derivatives) sampled on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    derivative: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise DomainError("grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise DomainError("grid must be strictly increasing")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise DomainError("samples must be finite")
        if self.derivative is not None:
            deriv = np.asarray(self.derivative, dtype=float)
            if deriv.shape != grid.shape or not np.all(np.isfinite(deriv)):
                raise DomainError("derivative must be finite and match the grid")
            object.__setattr__(self, "derivative", deriv)

    def __len__(self):
        return self.grid.size


# ---------------------------------------------------------------------------
# log-gamma

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def lgamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"lgamma requires finite x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument >= 0.5
        return math.log(math.pi / math.sin(math.pi * x)) - lgamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


# ---------------------------------------------------------------------------
# quadrature

_MAX_DEPTH = 60
_MAX_PANELS = 2_000_000
_INITIAL_PANELS = 8


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = Tolerance(),
) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    Each panel is refined until the Richardson estimate ``|S2 - S1| / 15``
    falls under its share (proportional to width) of
    ``max(abs_tol, rel_tol * |I|)``. Accepted panel contributions are
    summed with :func:`math.fsum` in left-to-right order, so results are
    reproducible bit for bit.

    Raises
    ------
    AccuracyError
        If a panel hits the depth cap (60) or the panel budget runs out.
        The best available estimate is attached as ``.estimate``.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"integrate_adaptive requires finite a < b, got [{a}, {b}]")

    width = b - a
    # coarse pass fixes the global error target
    edges = [a + width * k / _INITIAL_PANELS for k in range(_INITIAL_PANELS)] + [b]
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = float(f(lo)), float(f(mid)), float(f(hi))
        panels.append((lo, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi), 0))
    coarse = math.fsum(p[5] for p in panels)
    if not math.isfinite(coarse):
        raise AccuracyError("integrand is not finite on the interval", coarse)
    eps = tol.bound(coarse)

    accepted = []
    converged = True
    stack = list(reversed(panels))
    n_panels = 0
    while stack:
        lo, hi, flo, fmid, fhi, whole, depth = stack.pop()
        n_panels += 1
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = float(f(lm))
        frm = float(f(rm))
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        if not math.isfinite(delta):
            raise AccuracyError(f"integrand is not finite near {mid!r}", math.fsum(accepted))
        share = eps * (hi - lo) / width
        if abs(delta) <= 15.0 * share:
            accepted.append(left + right + delta / 15.0)
            continue
        if depth + 1 >= _MAX_DEPTH or n_panels >= _MAX_PANELS:
            converged = False
            accepted.append(left + right + delta / 15.0)
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, depth + 1))

    result = math.fsum(accepted)
    if not converged:
        raise AccuracyError(
            f"adaptive Simpson did not converge on [{a}, {b}] (depth cap {_MAX_DEPTH})",
            result,
        )
    return result


def _tan_integrand(f):
    def g(theta):
        c = math.cos(theta)
        fx = float(f(math.tan(theta)))
        if not math.isfinite(fx):
            return fx
        val = fx / (c * c)
        # theta = +-pi/2 is never hit exactly in floating point, but 1/cos^2
        # can still overflow against a vanishing tail
        return val if math.isfinite(val) else 0.0

    return g


def integrate_real_line(f: Callable[[float], float], tol: Tolerance = Tolerance()) -> float:
    """Integral of ``f`` over the whole real line.

    Uses ``x = tan(theta)`` on ``(-pi/2, pi/2)``, so algebraic tails such as
    the Cauchy density are handled without truncation.
    """
    half = 0.5 * math.pi
    return integrate_adaptive(_tan_integrand(f), -half, half, tol)


def integrate_half_line(f: Callable[[float], float], tol: Tolerance = Tolerance()) -> float:
    """Integral of ``f`` over ``[0, inf)`` via the same tangent map."""
    return integrate_adaptive(_tan_integrand(f), 0.0, 0.5 * math.pi, tol)


# ---------------------------------------------------------------------------
# finite differences


def fd_second_derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """Central three-point second derivative, O(h^2)."""
    if not h > 0:
        raise DomainError(f"step h must be > 0, got {h!r}")
    return (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# 5th-order minus embedded 4th-order weights (7 stages, last one is FSAL)
_DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t + s*h) = y + h * K^T @ P @ [s, s^2, s^3, s^4]
_DP_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)


@dataclass
class ODEResult:
    """Trajectory returned by :func:`ode_solve_adaptive`.

    ``t`` has shape ``(m,)`` and ``y`` shape ``(n_state, m)``. ``stop_reason``
    is ``"span_end"`` when the full span was covered, otherwise the reason
    reported by the stop predicate. ``stop_t`` is where integration halted.
    """

    t: np.ndarray
    y: np.ndarray
    stop_reason: str
    stop_t: float
    n_steps: int = 0
    n_rejected: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def completed(self) -> bool:
        return self.stop_reason == "span_end"

    def component(self, i: int, derivative: Optional[int] = None) -> Samples1D:
        """Samples of state component ``i``; ``derivative`` names the component
        holding its derivative, if any. Grids are reordered to increase."""
        order = np.argsort(self.t, kind="stable")
        deriv = None if derivative is None else self.y[derivative][order]
        return Samples1D(self.t[order], self.y[i][order], deriv)


def _error_norm(err, y0, y1, tol):
    scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def ode_solve_adaptive(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    span: Sequence[float],
    tol: Tolerance = Tolerance(),
    stop: Optional[Callable[[float, np.ndarray], object]] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> ODEResult:
    """Integrate ``y' = rhs(t, y)`` across ``span`` with Dormand-Prince 5(4).

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> array`` of the same shape as ``y``.
    y0 : array_like
        Initial state.
    span : (t0, t1)
        Integration interval; ``t1 < t0`` integrates backwards.
    tol : Tolerance
        Local error control, mixed absolute/relative, max-norm.
    stop : callable, optional
        ``stop(t, y)`` is evaluated after every accepted step. A truthy return
        halts integration; if it is a string it becomes the stop reason.
        Output then ends at the last step where the predicate was false.
    t_eval : array_like, optional
        Points at which to report the solution (dense output). Defaults to
        the accepted step points.

    Raises
    ------
    IntegrationError
        When the step shrinks below ``1e-14 * |t1 - t0|``.
    """
    t0, t1 = float(span[0]), float(span[1])
    if t0 == t1:
        raise DomainError("span must have nonzero length")
    direction = 1.0 if t1 > t0 else -1.0
    length = abs(t1 - t0)
    h = length / 100.0
    h_min = 1e-14 * length

    y = np.array(y0, dtype=float).reshape(-1)
    f = np.asarray(rhs(t0, y), dtype=float)
    if not np.all(np.isfinite(f)):
        raise IntegrationError("rhs is not finite at the initial point", t0, y.copy())

    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any((t_eval - t0) * direction < 0) or np.any((t_eval - t1) * direction > 0):
            raise DomainError("t_eval points must lie inside span")
        if t_eval.size > 1 and np.any(np.diff(t_eval) * direction <= 0):
            raise DomainError("t_eval must be strictly monotone in the integration direction")
    out_t = []
    out_y = []
    next_eval = 0
    if t_eval is None:
        out_t.append(t0)
        out_y.append(y.copy())
    else:
        while next_eval < t_eval.size and t_eval[next_eval] == t0:
            out_t.append(t0)
            out_y.append(y.copy())
            next_eval += 1

    K = np.empty((7, y.size))
    t = t0
    n_steps = 0
    n_rejected = 0
    stop_reason = "span_end"
    while (t1 - t) * direction > 0:
        if h < h_min:
            raise IntegrationError(
                f"step size underflow at t={t!r} (h={h:.3e} < {h_min:.3e})", t, y.copy()
            )
        step = min(h, abs(t1 - t))
        dt = direction * step
        K[0] = f
        for i in range(1, 6):
            K[i] = rhs(t + _DP_C[i] * dt, y + dt * (_DP_A[i] @ K[:i]))
        y_new = y + dt * (_DP_B @ K[:6])
        t_new = t + dt if step < abs(t1 - t) else t1
        f_new = np.asarray(rhs(t_new, y_new), dtype=float)
        K[6] = f_new
        err = dt * (_DP_E @ K)
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new))):
            n_rejected += 1
            h = step * 0.2
            continue
        err_norm = _error_norm(err, y, y_new, tol)
        if err_norm > 1.0:
            n_rejected += 1
            h = step * max(0.2, 0.9 * err_norm ** -0.2)
            continue

        n_steps += 1
        halted = stop(t_new, y_new) if stop is not None else False
        if halted:
            stop_reason = halted if isinstance(halted, str) else "stop condition"
            t_halt = t_new
            break

        if t_eval is None:
            out_t.append(t_new)
            out_y.append(y_new.copy())
        else:
            Q = K.T @ _DP_P
            while next_eval < t_eval.size and (t_eval[next_eval] - t_new) * direction <= 0:
                s = (t_eval[next_eval] - t) / dt
                if t_eval[next_eval] == t_new:
                    y_s = y_new.copy()
                else:
                    y_s = y + dt * (Q @ np.array([s, s * s, s ** 3, s ** 4]))
                out_t.append(float(t_eval[next_eval]))
                out_y.append(y_s)
                next_eval += 1

        t, y, f = t_new, y_new, f_new
        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h = step * factor
    else:
        t_halt = t

    y_arr = np.array(out_y).T if out_y else np.empty((y.size, 0))
    return ODEResult(
        t=np.array(out_t, dtype=float),
        y=y_arr,
        stop_reason=stop_reason,
        stop_t=float(t_halt),
        n_steps=n_steps,
        n_rejected=n_rejected,
    )
