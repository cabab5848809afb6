"""Equation family, traveling-wave reduction, first integrals and transforms.

The family is

    phi*(phi_xx - phi_tt) - a*(phi_x**2 - phi_t**2) = F(phi)

with ``F(phi) = -b*phi**(n+1)`` for the power-law member. Substituting
``eta = (x - u*t)/sqrt(1 - u**2)`` gives the profile equation

    phi*phi'' - a*(phi')**2 = F(phi)

for every subluminal speed ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .errors import DomainError, FrameError, UnsupportedFormError

__all__ = [
    "PowerTerm",
    "PhiSinPhiTerm",
    "PowerLaw",
    "GeneralF",
    "DiracReduced",
    "WaveFrame",
    "TravelingWaveODE",
    "FirstIntegral",
    "canonicalize",
    "as_power_law",
    "equivalent",
    "reduce_to_ode",
    "first_integral",
    "p_transform",
    "boost_compose",
    "dirac_rho_ode",
    "eval_F",
    "eval_F_over_phi",
    "potential",
]

_EXP_ATOL = 1e-12


def _same(x, y):
    return math.isclose(x, y, rel_tol=1e-12, abs_tol=_EXP_ATOL)


def _finite(*vals):
    return all(math.isfinite(v) for v in vals)


@dataclass(frozen=True)
class PowerTerm:
    """``coef * phi**exponent``"""

    coef: float
    exponent: float

    def __post_init__(self):
        if not _finite(self.coef, self.exponent):
            raise DomainError("PowerTerm coefficients must be finite")


@dataclass(frozen=True)
class PhiSinPhiTerm:
    """``coef * phi * sin(phi)``"""

    coef: float

    def __post_init__(self):
        if not _finite(self.coef):
            raise DomainError("PhiSinPhiTerm coefficient must be finite")


FTerm = Union[PowerTerm, PhiSinPhiTerm]


@dataclass(frozen=True)
class PowerLaw:
    """Power-law member: ``F(phi) = -b * phi**(n + 1)``."""

    a: float
    b: float
    n: float

    def __post_init__(self):
        if not _finite(self.a, self.b, self.n):
            raise DomainError("PowerLaw parameters must be finite")


@dataclass(frozen=True)
class GeneralF:
    """Member with an arbitrary sum of terms on the right-hand side."""

    a: float
    terms: Tuple[FTerm, ...]

    def __post_init__(self):
        if not _finite(self.a):
            raise DomainError("GeneralF.a must be finite")
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if not isinstance(term, (PowerTerm, PhiSinPhiTerm)):
                raise DomainError(f"unknown F term {term!r}")


@dataclass(frozen=True)
class DiracReduced:
    """Scalar density reduction of the nonlinear Dirac equation.

    ``n_stat`` selects the statistics: 1 Fermi-Dirac, -1 Bose-Einstein,
    0 Maxwell-Boltzmann.
    """

    m: float
    b: float
    n_stat: int

    def __post_init__(self):
        if not _finite(self.m, self.b):
            raise DomainError("DiracReduced parameters must be finite")
        if not self.m > 0:
            raise DomainError(f"DiracReduced.m must be > 0, got {self.m}")
        if self.b == 0:
            raise DomainError("DiracReduced.b must be nonzero")
        if self.n_stat not in (-1, 0, 1):
            raise DomainError(f"n_stat must be -1, 0 or 1, got {self.n_stat}")


EquationSpec = Union[PowerLaw, GeneralF, DiracReduced]


@dataclass(frozen=True)
class WaveFrame:
    """Wave speed in units where the light speed is 1."""

    u: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.u) and abs(self.u) < 1.0):
            raise FrameError(f"WaveFrame requires |u| < 1, got u={self.u!r}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.u * self.u)

    def eta(self, x, t):
        """Traveling coordinate ``(x - u t) / sqrt(1 - u^2)``."""
        return (np.asarray(x, dtype=float) - self.u * np.asarray(t, dtype=float)) * self.gamma


@dataclass(frozen=True)
class TravelingWaveODE:
    """Profile equation ``phi*phi'' - a*(phi')**2 = F(phi)``.

    ``spec`` is stored in canonical (term-list) form; ``frame`` is kept only to
    record which speed the reduction was performed at.
    """

    spec: GeneralF
    frame: WaveFrame

    @property
    def a(self) -> float:
        return self.spec.a

    def F(self, phi):
        return eval_F(self.spec, phi)

    def second_derivative(self, phi, dphi):
        """Solve the profile equation for phi''."""
        return (self.spec.a * dphi * dphi + eval_F(self.spec, phi)) / phi

    def residual(self, phi, dphi, ddphi):
        return phi * ddphi - self.spec.a * dphi * dphi - eval_F(self.spec, phi)


# ---------------------------------------------------------------------------
# term-list helpers


def canonicalize(spec: EquationSpec) -> GeneralF:
    """Lower a spec to a sorted term list with like powers merged.

    ``PowerLaw(a, b, n)`` becomes ``GeneralF(a, [PowerTerm(-b, n + 1)])``.
    """
    if isinstance(spec, DiracReduced):
        raise UnsupportedFormError("DiracReduced has no term-list form")
    if isinstance(spec, PowerLaw):
        terms = [PowerTerm(-spec.b, spec.n + 1.0)]
        a = spec.a
    else:
        terms = list(spec.terms)
        a = spec.a
    powers = {}
    sin_coef = 0.0
    for term in terms:
        if isinstance(term, PowerTerm):
            key = next((e for e in powers if _same(e, term.exponent)), term.exponent)
            powers[key] = powers.get(key, 0.0) + term.coef
        else:
            sin_coef += term.coef
    merged = [PowerTerm(c, e) for e, c in sorted(powers.items()) if c != 0.0]
    if sin_coef != 0.0:
        merged.append(PhiSinPhiTerm(sin_coef))
    return GeneralF(a, tuple(merged))


def as_power_law(spec: EquationSpec):
    """Return the equivalent ``PowerLaw`` or ``None`` if there is none."""
    if isinstance(spec, PowerLaw):
        return spec
    if isinstance(spec, DiracReduced):
        return None
    canon = canonicalize(spec)
    if len(canon.terms) == 0:
        return PowerLaw(canon.a, 0.0, 1.0)
    if len(canon.terms) == 1 and isinstance(canon.terms[0], PowerTerm):
        term = canon.terms[0]
        return PowerLaw(canon.a, -term.coef, term.exponent - 1.0)
    return None


def equivalent(s1: EquationSpec, s2: EquationSpec) -> bool:
    """Semantic equality (PowerLaw vs. its one-term GeneralF compare equal)."""
    if isinstance(s1, DiracReduced) or isinstance(s2, DiracReduced):
        return s1 == s2
    c1, c2 = canonicalize(s1), canonicalize(s2)
    if not _same(c1.a, c2.a) or len(c1.terms) != len(c2.terms):
        return False
    for t1, t2 in zip(c1.terms, c2.terms):
        if type(t1) is not type(t2) or not _same(t1.coef, t2.coef):
            return False
        if isinstance(t1, PowerTerm) and not _same(t1.exponent, t2.exponent):
            return False
    return True


def _terms(spec):
    return canonicalize(spec).terms if not isinstance(spec, GeneralF) else spec.terms


def eval_F(spec: EquationSpec, phi):
    """F(phi) for a power-law or general spec (vectorised)."""
    phi = np.asarray(phi, dtype=float)
    out = np.zeros_like(phi)
    for term in _terms(spec):
        if isinstance(term, PowerTerm):
            out = out + term.coef * np.power(phi, term.exponent)
        else:
            out = out + term.coef * phi * np.sin(phi)
    return out


def eval_F_over_phi(spec: EquationSpec, phi):
    """F(phi)/phi expanded term by term, finite at phi = 0 for integer powers >= 1."""
    phi = np.asarray(phi, dtype=float)
    out = np.zeros_like(phi)
    for term in _terms(spec):
        if isinstance(term, PowerTerm):
            e = term.exponent - 1.0
            if e == 0.0:
                out = out + term.coef
            elif e == 1.0:
                out = out + term.coef * phi
            else:
                out = out + term.coef * np.power(phi, e)
        else:
            out = out + term.coef * np.sin(phi)
    return out


def potential(spec: EquationSpec, phi):
    """Antiderivative of F(phi)/phi, term by term, zero additive constant.

    For ``a = 0`` this is the potential ``V`` in ``phi_tt = phi_xx - V'(phi)``.
    """
    phi = np.asarray(phi, dtype=float)
    out = np.zeros_like(phi)
    for term in _terms(spec):
        if isinstance(term, PowerTerm):
            e = term.exponent
            if e == 0.0:
                out = out + term.coef * np.log(np.abs(phi))
            else:
                out = out + term.coef * np.power(phi, e) / e
        else:
            out = out - term.coef * np.cos(phi)
    return out


# ---------------------------------------------------------------------------
# operations


def reduce_to_ode(spec: EquationSpec, frame) -> TravelingWaveODE:
    """Traveling-wave reduction of the PDE at speed ``frame.u``.

    Both ``phi_xx - phi_tt`` and ``phi_x**2 - phi_t**2`` pick up the factor
    ``(1 - u**2) / (1 - u**2)``, so the resulting coefficients never depend on u.
    """
    if not isinstance(frame, WaveFrame):
        frame = WaveFrame(float(frame))
    if isinstance(spec, DiracReduced):
        raise UnsupportedFormError("use dirac_rho_ode for DiracReduced specs")
    return TravelingWaveODE(canonicalize(spec), frame)


@dataclass(frozen=True)
class PowerAntiderivative:
    coef: float
    power: float


@dataclass(frozen=True)
class LogAbsAntiderivative:
    coef: float


@dataclass(frozen=True)
class CosAntiderivative:
    coef: float


@dataclass(frozen=True)
class FirstIntegral:
    """``(phi')**2 = phi**(2a) * (G(phi) + C)``.

    ``terms`` hold G, the antiderivative of ``2 F(phi) phi**(-1-2a)``.
    """

    a: float
    terms: tuple
    C: float

    def G(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        for term in self.terms:
            if isinstance(term, PowerAntiderivative):
                out = out + term.coef * np.power(phi, term.power)
            elif isinstance(term, LogAbsAntiderivative):
                out = out + term.coef * np.log(np.abs(phi))
            else:
                out = out + term.coef * np.cos(phi)
        return out

    def G_magnitude(self, phi):
        """Sum of absolute term values; used to scale relative residuals."""
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        for term in self.terms:
            if isinstance(term, PowerAntiderivative):
                out = out + np.abs(term.coef * np.power(phi, term.power))
            elif isinstance(term, LogAbsAntiderivative):
                out = out + np.abs(term.coef * np.log(np.abs(phi)))
            else:
                out = out + np.abs(term.coef * np.cos(phi))
        return out

    def slope_squared(self, phi):
        """Right-hand side ``phi**(2a) * (G(phi) + C)``."""
        phi = np.asarray(phi, dtype=float)
        return np.power(phi, 2.0 * self.a) * (self.G(phi) + self.C)

    def invariant(self, phi, dphi):
        """``Q = (phi')**2 * phi**(-2a) - G(phi)``, equal to C along solutions."""
        phi = np.asarray(phi, dtype=float)
        dphi = np.asarray(dphi, dtype=float)
        return dphi * dphi * np.power(phi, -2.0 * self.a) - self.G(phi)


def first_integral(spec: EquationSpec, C: float = 0.0) -> FirstIntegral:
    """First integral of the profile equation.

    With ``w = (phi')**2`` the profile equation becomes linear in w, and
    ``w = phi**(2a) z`` turns it into ``z' = 2 F(phi) phi**(-1-2a)``. Each term
    is integrated in closed form; a combined exponent of -1 gives a log term.
    """
    canon = canonicalize(spec)
    a = canon.a
    out = []
    for term in canon.terms:
        if isinstance(term, PowerTerm):
            q = term.exponent - 1.0 - 2.0 * a
            if abs(q + 1.0) <= _EXP_ATOL:
                out.append(LogAbsAntiderivative(2.0 * term.coef))
            else:
                out.append(PowerAntiderivative(2.0 * term.coef / (q + 1.0), q + 1.0))
        else:
            if a != 0.0:
                raise UnsupportedFormError(
                    f"phi*sin(phi) term has no closed-form first integral for a={a}"
                )
            out.append(CosAntiderivative(-2.0 * term.coef))
    return FirstIntegral(a, tuple(out), float(C))


_SNAP = 4.0 * np.finfo(float).eps


def p_transform(spec: PowerLaw, p: float) -> PowerLaw:
    """Coefficients after substituting ``phi = y**p``.

    The equation keeps its form with ``a' = a p - p + 1``, ``b' = b / p`` and
    ``n' = p (n - 1) + 1``. A result ``a'`` within a few ulps of zero is
    snapped to 0 so the ``p = 1/(1-a)`` reduction is exactly semilinear.
    """
    if not isinstance(spec, PowerLaw):
        raise UnsupportedFormError("p_transform applies to PowerLaw specs only")
    p = float(p)
    if p == 0.0 or not math.isfinite(p):
        raise DomainError(f"p must be finite and nonzero, got {p!r}")
    a_new = 1.0 - p * (1.0 - spec.a)
    if abs(a_new) <= _SNAP * max(1.0, abs(p), abs(p * spec.a)):
        a_new = 0.0
    return PowerLaw(a_new, spec.b / p, p * (spec.n - 1.0) + 1.0)


def boost_compose(u: float, w: float) -> float:
    """Relativistic velocity addition ``(u + w) / (1 + u w)``."""
    for name, val in (("u", u), ("w", w)):
        if not (math.isfinite(val) and abs(val) < 1.0):
            raise FrameError(f"{name} must satisfy |{name}| < 1, got {val!r}")
    return (u + w) / (1.0 + u * w)


def dirac_rho_ode(spec: DiracReduced) -> Callable[[float, float], float]:
    """Density equation ``rho' = 2 n b rho**2 - 2 m rho``.

    Follows from ``psi' = n b psi (rho - m/(n b))`` with ``rho = psi^+ psi``
    treated as a real scalar.
    """
    if not isinstance(spec, DiracReduced):
        raise UnsupportedFormError("dirac_rho_ode needs a DiracReduced spec")
    two_nb = 2.0 * spec.n_stat * spec.b
    two_m = 2.0 * spec.m

    def rhs(eta, rho):
        return two_nb * rho * rho - two_m * rho

    return rhs
