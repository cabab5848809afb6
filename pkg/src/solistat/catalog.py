"""Closed-form soliton profiles, their validity domains and a spec matcher.

Every entry knows the equation it solves (``entry.spec``), returns analytic
value / first / second derivative, and reports where the formula is usable.
Three constants are fixed by substituting the profile back into its
equation:

* ``Logistic`` rate ``kappa = b / (2 sqrt f)``
* ``TanhKink`` rate ``sqrt(-f / 2)``
* ``QuantumRho`` amplitude ``m / b``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import ClassVar, Optional, Tuple

import numpy as np

from .core import (
    DiracReduced,
    GeneralF,
    PhiSinPhiTerm,
    PowerLaw,
    PowerTerm,
    as_power_law,
    canonicalize,
)
from .errors import CatalogMiss, ConstantMismatch, DomainError

__all__ = [
    "ValidityDomain",
    "ClosedFormSolution",
    "RationalBell",
    "GaussBell",
    "PowerBell",
    "ExpProfile",
    "Logistic",
    "SechPulse",
    "TanhKink",
    "SGKink",
    "BEProfileSq",
    "QuantumRho",
    "VARIANTS",
    "solve_catalog",
    "evaluate",
    "domain",
    "asymptotic_decay",
    "canonical_entries",
    "from_dict",
]

DEFAULT_CLEARANCE = 1e-3
_INF = math.inf


@dataclass(frozen=True)
class ValidityDomain:
    """Open intervals on which a profile is finite (and positive if required)."""

    intervals: Tuple[Tuple[float, float], ...]
    singularities: Tuple[float, ...] = ()

    def contains(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        inside = np.zeros(eta.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (eta > lo) & (eta < hi)
        return inside

    def nearest_singularity(self, eta: float) -> Optional[float]:
        if not self.singularities:
            return None
        return min(self.singularities, key=lambda s: abs(s - eta))

    def check(self, eta) -> None:
        """Raise :class:`DomainError` naming the nearest singularity if any
        point lies outside."""
        eta = np.asarray(eta, dtype=float)
        bad = ~self.contains(eta)
        if np.any(bad):
            where = float(np.atleast_1d(eta)[np.atleast_1d(bad)][0])
            sing = self.nearest_singularity(where)
            hint = f"; nearest singularity at eta={sing:.17g}" if sing is not None else ""
            raise DomainError(f"eta={where:.17g} is outside the validity domain{hint}")

    def grid(
        self,
        lo: float = -10.0,
        hi: float = 10.0,
        points: int = 400,
        clearance: float = DEFAULT_CLEARANCE,
    ) -> np.ndarray:
        """Uniform-per-piece grid on the domain clipped to ``[lo, hi]``.

        Finite interval ends (singularities or positivity boundaries) are
        kept ``clearance`` away. Points are shared out by piece length.
        """
        pieces = []
        for a, b in self.intervals:
            left = max(lo, a + clearance) if math.isfinite(a) else lo
            right = min(hi, b - clearance) if math.isfinite(b) else hi
            if math.isfinite(a) and a + clearance < lo:
                left = lo
            if math.isfinite(b) and b - clearance > hi:
                right = hi
            if right > left:
                pieces.append((left, right))
        if not pieces:
            raise DomainError(f"validity domain has no points inside [{lo}, {hi}]")
        total = sum(b - a for a, b in pieces)
        counts = [max(2, int(round(points * (b - a) / total))) for a, b in pieces]
        counts[-1] += points - sum(counts)
        if counts[-1] < 2:
            counts[-1] = 2
        return np.concatenate([np.linspace(a, b, c) for (a, b), c in zip(pieces, counts)])


def _share(E, c):
    """``E / (E + c)`` for ``E = exp(...) >= 0``, finite when E overflows."""
    if c == 0:
        return np.ones_like(E)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(E > 1.0, 1.0 / (1.0 + c / E), E / (E + c))


def _whole_line():
    return ValidityDomain(((-_INF, _INF),))


def _split_at(points):
    pts = sorted(points)
    edges = [-_INF] + pts + [_INF]
    return ValidityDomain(tuple(zip(edges[:-1], edges[1:])), tuple(pts))


class ClosedFormSolution:
    """Base class for catalog entries (frozen dataclasses)."""

    variant: ClassVar[str] = ""
    #: the entry stores a density rho = |phi|**2 (or psi^+ psi), not phi
    stores_density: ClassVar[bool] = False
    #: which convention the integration constant follows
    constant_name: ClassVar[str] = "C1"

    @property
    def spec(self):
        raise NotImplementedError

    @property
    def integration_constant(self) -> Optional[float]:
        """Constant C in ``(phi')**2 = phi**(2a) (G(phi) + C)``."""
        return None

    def domain(self) -> ValidityDomain:
        return _whole_line()

    def decay(self) -> Tuple[bool, bool]:
        """Does the value tend to zero at (eta -> -inf, eta -> +inf)?"""
        raise NotImplementedError

    def limits(self) -> Tuple[float, float]:
        """Analytic limits of the value at (-inf, +inf); nan if outside the domain."""
        raise NotImplementedError

    def _raw(self, eta):
        raise NotImplementedError

    def evaluate(self, eta, check: bool = True):
        """Return ``(value, first_derivative, second_derivative)``."""
        eta = np.asarray(eta, dtype=float)
        if check:
            self.domain().check(eta)
        with np.errstate(over="ignore"):
            v, d1, d2 = self._raw(eta)
        if eta.ndim == 0:
            return float(v), float(d1), float(d2)
        return v, d1, d2

    def field(self, eta, check: bool = True):
        """Field phi and its derivatives; for density entries phi = sqrt(rho)."""
        v, d1, d2 = self.evaluate(eta, check)
        if not self.stores_density:
            return v, d1, d2
        phi = np.sqrt(v)
        dphi = d1 / (2.0 * phi)
        ddphi = d2 / (2.0 * phi) - d1 * d1 / (4.0 * v * phi)
        return phi, dphi, ddphi

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_dict(self) -> dict:
        return {"variant": self.variant, **self.params()}


# ---------------------------------------------------------------------------
# bells


@dataclass(frozen=True)
class RationalBell(ClosedFormSolution):
    """``phi = 2b / (b^2 (eta + C2)^2 - C1)``; solves PowerLaw(a=2, b, n=2)."""

    b: float
    C1: float
    C2: float = 0.0
    variant: ClassVar[str] = "RationalBell"

    def __post_init__(self):
        if self.b == 0:
            raise DomainError("RationalBell needs b != 0")

    @property
    def spec(self):
        return PowerLaw(2.0, self.b, 2.0)

    @property
    def integration_constant(self):
        return self.C1

    def domain(self):
        if self.C1 < 0:
            return _whole_line()
        r = math.sqrt(self.C1) / abs(self.b)
        if r == 0:
            return _split_at([-self.C2])
        return _split_at([-self.C2 - r, -self.C2 + r])

    def decay(self):
        return True, True

    def limits(self):
        return 0.0, 0.0

    def _raw(self, eta):
        b = self.b
        s = eta + self.C2
        D = b * b * s * s - self.C1
        v = 2.0 * b / D
        d1 = -4.0 * b ** 3 * s / (D * D)
        d2 = -4.0 * b ** 3 / (D * D) + 16.0 * b ** 5 * s * s / D ** 3
        return v, d1, d2


@dataclass(frozen=True)
class GaussBell(ClosedFormSolution):
    """``phi = exp[(C1 - b^2 (eta + C2)^2) / (2b)]``; solves PowerLaw(1, b, 1)."""

    b: float
    C1: float
    C2: float = 0.0
    variant: ClassVar[str] = "GaussBell"

    def __post_init__(self):
        if self.b == 0:
            raise DomainError("GaussBell needs b != 0")

    @property
    def spec(self):
        return PowerLaw(1.0, self.b, 1.0)

    @property
    def integration_constant(self):
        return self.C1

    def decay(self):
        return (self.b > 0, self.b > 0)

    def limits(self):
        lim = 0.0 if self.b > 0 else _INF
        return lim, lim

    def _raw(self, eta):
        b = self.b
        s = eta + self.C2
        v = np.exp((self.C1 - b * b * s * s) / (2.0 * b))
        return v, -b * s * v, (b * b * s * s - b) * v


@dataclass(frozen=True)
class PowerBell(ClosedFormSolution):
    """``phi = [(b^2 (eta+C2)^2 - C1) / (b (nu+1))]^(-(nu+1)/2)``.

    Solves PowerLaw with ``a = n = (nu+3)/(nu+1)``.
    """

    nu: float
    b: float
    C1: float
    C2: float = 0.0
    variant: ClassVar[str] = "PowerBell"

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"PowerBell needs nu > 0, got {self.nu}")
        if self.b == 0:
            raise DomainError("PowerBell needs b != 0")

    @property
    def exponent(self) -> float:
        return (self.nu + 3.0) / (self.nu + 1.0)

    @property
    def spec(self):
        return PowerLaw(self.exponent, self.b, self.exponent)

    @property
    def integration_constant(self):
        return self.C1

    def domain(self):
        # base of the fractional power must be positive
        b, C1 = self.b, self.C1
        if b > 0:
            if C1 < 0:
                return _whole_line()
            r = math.sqrt(C1) / b
            if r == 0:
                return _split_at([-self.C2])
            lo, hi = -self.C2 - r, -self.C2 + r
            return ValidityDomain(((-_INF, lo), (hi, _INF)), (lo, hi))
        if C1 <= 0:
            return ValidityDomain((), ())
        r = math.sqrt(C1) / abs(b)
        lo, hi = -self.C2 - r, -self.C2 + r
        return ValidityDomain(((lo, hi),), (lo, hi))

    def decay(self):
        return (self.b > 0, self.b > 0)

    def limits(self):
        return (0.0, 0.0) if self.b > 0 else (math.nan, math.nan)

    def _raw(self, eta):
        b, nu = self.b, self.nu
        k = 0.5 * (nu + 1.0)
        s = eta + self.C2
        D = (b * b * s * s - self.C1) / (b * (nu + 1.0))
        v = np.power(D, -k)
        d1 = -b * s * np.power(D, -k - 1.0)
        d2 = -b * np.power(D, -k - 1.0) + b * b * s * s * (k + 1.0) / k * np.power(D, -k - 2.0)
        return v, d1, d2


@dataclass(frozen=True)
class ExpProfile(ClosedFormSolution):
    """``phi = C0 exp(-c eta)``; solves PowerLaw(a=1, b=0)."""

    C0: float
    c: float
    variant: ClassVar[str] = "ExpProfile"

    @property
    def spec(self):
        return PowerLaw(1.0, 0.0, 1.0)

    @property
    def integration_constant(self):
        return self.c * self.c

    def decay(self):
        if self.C0 == 0:
            return True, True
        return (self.c < 0, self.c > 0)

    def limits(self):
        if self.C0 == 0:
            return 0.0, 0.0
        big = math.copysign(_INF, self.C0)
        if self.c > 0:
            return big, 0.0
        if self.c < 0:
            return 0.0, big
        return self.C0, self.C0

    def _raw(self, eta):
        v = self.C0 * np.exp(-self.c * eta)
        return v, -self.c * v, self.c * self.c * v


# ---------------------------------------------------------------------------
# general-F entries


@dataclass(frozen=True)
class Logistic(ClosedFormSolution):
    """``phi = A / (exp(-kappa (eta + C2)) + b)``, ``A = b^2/(2f)``, ``kappa = b/(2 sqrt f)``.

    Solves ``a = 1``, ``F = f phi^4 - (b/2) phi^3`` with ``C1 = b^2/(4f)``.
    """

    f: float
    b: float
    C2: float = 0.0
    variant: ClassVar[str] = "Logistic"

    def __post_init__(self):
        if not self.f > 0:
            raise DomainError(f"Logistic needs f > 0, got {self.f}")
        if self.b == 0:
            raise DomainError("Logistic needs b != 0")

    @property
    def amplitude(self):
        return self.b * self.b / (2.0 * self.f)

    @property
    def rate(self):
        return self.b / (2.0 * math.sqrt(self.f))

    @property
    def spec(self):
        return GeneralF(1.0, (PowerTerm(self.f, 4.0), PowerTerm(-0.5 * self.b, 3.0)))

    @property
    def integration_constant(self):
        return self.b * self.b / (4.0 * self.f)

    def domain(self):
        if self.b > 0:
            return _whole_line()
        pole = -math.log(-self.b) / self.rate - self.C2
        return _split_at([pole])

    def decay(self):
        # exp(-kappa s) -> inf on the side where kappa s -> -inf
        return (self.rate > 0, self.rate < 0)

    def limits(self):
        plateau = self.amplitude / self.b
        return (0.0, plateau) if self.rate > 0 else (plateau, 0.0)

    def _raw(self, eta):
        A, k = self.amplitude, self.rate
        g = np.exp(-k * (eta + self.C2))
        v = A / (g + self.b)
        r = _share(g, self.b)
        d1 = k * v * r
        d2 = k * k * v * r * (2.0 * r - 1.0)
        return v, d1, d2


@dataclass(frozen=True)
class SechPulse(ClosedFormSolution):
    """``phi = sqrt(2f/b) sech(sqrt(f) eta + C)``; ``a = 0``, ``F = f phi^2 - b phi^4``, C1 = 0."""

    f: float
    b: float
    C: float = 0.0
    variant: ClassVar[str] = "SechPulse"

    def __post_init__(self):
        if not (self.f > 0 and self.b > 0):
            raise DomainError("SechPulse needs f > 0 and b > 0")

    @property
    def spec(self):
        return GeneralF(0.0, (PowerTerm(self.f, 2.0), PowerTerm(-self.b, 4.0)))

    @property
    def integration_constant(self):
        return 0.0

    def decay(self):
        return True, True

    def limits(self):
        return 0.0, 0.0

    def _raw(self, eta):
        A = math.sqrt(2.0 * self.f / self.b)
        k = math.sqrt(self.f)
        z = k * eta + self.C
        sech = 1.0 / np.cosh(z)
        th = np.tanh(z)
        v = A * sech
        return v, -A * k * sech * th, A * k * k * sech * (1.0 - 2.0 * sech * sech)


@dataclass(frozen=True)
class TanhKink(ClosedFormSolution):
    """``phi = sqrt(f/b) tanh(sqrt(-f/2) eta + C)`` for ``f < 0, b < 0``; C1 = -f^2/(2b)."""

    f: float
    b: float
    C: float = 0.0
    variant: ClassVar[str] = "TanhKink"

    def __post_init__(self):
        if not (self.f < 0 and self.b < 0):
            raise DomainError("TanhKink needs f < 0 and b < 0")

    @property
    def amplitude(self):
        return math.sqrt(self.f / self.b)

    @property
    def rate(self):
        return math.sqrt(-0.5 * self.f)

    @property
    def spec(self):
        return GeneralF(0.0, (PowerTerm(self.f, 2.0), PowerTerm(-self.b, 4.0)))

    @property
    def integration_constant(self):
        return -self.f * self.f / (2.0 * self.b)

    def decay(self):
        return False, False

    def limits(self):
        return -self.amplitude, self.amplitude

    def _raw(self, eta):
        A, k = self.amplitude, self.rate
        z = k * eta + self.C
        th = np.tanh(z)
        sech2 = 1.0 / np.cosh(z) ** 2
        return A * th, A * k * sech2, -2.0 * A * k * k * sech2 * th


@dataclass(frozen=True)
class SGKink(ClosedFormSolution):
    """Sine-Gordon kink ``phi = 4 arctan(exp(eta + C2))``; ``F = phi sin(phi)``, C1 = 2."""

    C2: float = 0.0
    variant: ClassVar[str] = "SGKink"

    @property
    def spec(self):
        return GeneralF(0.0, (PhiSinPhiTerm(1.0),))

    @property
    def integration_constant(self):
        return 2.0

    def decay(self):
        return True, False

    def limits(self):
        return 0.0, 2.0 * math.pi

    def _raw(self, eta):
        s = eta + self.C2
        sech = 1.0 / np.cosh(s)
        v = 4.0 * np.arctan(np.exp(s))
        return v, 2.0 * sech, -2.0 * sech * np.tanh(s)


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class BEProfileSq(ClosedFormSolution):
    """Squared modulus ``rho = 2m^2 / (exp(-2m eta + C) - alpha/2)``.

    Solves the quintic Klein-Gordon profile with ``beta = sqrt(3) alpha/(4m)``
    and ``C0 = 0``; the stored value is ``rho = phi**2``.
    """

    m: float
    alpha: float
    C: float = 0.0
    variant: ClassVar[str] = "BEProfileSq"
    stores_density: ClassVar[bool] = True
    constant_name: ClassVar[str] = "C0"

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError(f"BEProfileSq needs m > 0, got {self.m}")

    @property
    def beta_sq(self):
        return 3.0 * self.alpha * self.alpha / (16.0 * self.m * self.m)

    @property
    def spec(self):
        m2 = self.m * self.m
        return GeneralF(
            0.0,
            (PowerTerm(m2, 2.0), PowerTerm(self.alpha, 4.0), PowerTerm(self.beta_sq, 6.0)),
        )

    @property
    def integration_constant(self):
        return 0.0

    @property
    def pole(self) -> Optional[float]:
        if self.alpha <= 0:
            return None
        return (self.C - math.log(0.5 * self.alpha)) / (2.0 * self.m)

    def domain(self):
        pole = self.pole
        if pole is None:
            return _whole_line()
        # rho > 0 only on the side where exp(-2m eta + C) > alpha/2
        return ValidityDomain(((-_INF, pole),), (pole,))

    def decay(self):
        return True, False

    def limits(self):
        if self.alpha > 0:
            return 0.0, math.nan
        if self.alpha < 0:
            return 0.0, -4.0 * self.m * self.m / self.alpha
        return 0.0, _INF

    def _raw(self, eta):
        m = self.m
        E = np.exp(-2.0 * m * eta + self.C)
        v = 2.0 * m * m / (E - 0.5 * self.alpha)
        r = _share(E, -0.5 * self.alpha)
        d1 = 2.0 * m * v * r
        d2 = 4.0 * m * m * v * r * (2.0 * r - 1.0)
        return v, d1, d2


@dataclass(frozen=True)
class QuantumRho(ClosedFormSolution):
    """Occupation profile ``rho = (m/b) / (exp(2m eta + C) + n_stat)``.

    n_stat = 1, -1, 0 give the Fermi-Dirac, Bose-Einstein and
    Maxwell-Boltzmann shapes; solves ``rho' = 2 n b rho^2 - 2 m rho``.
    """

    m: float
    b: float
    n_stat: int
    C: float = 0.0
    variant: ClassVar[str] = "QuantumRho"
    constant_name: ClassVar[str] = "C"

    def __post_init__(self):
        DiracReduced(self.m, self.b, self.n_stat)

    @property
    def amplitude(self):
        return self.m / self.b

    @property
    def spec(self):
        return DiracReduced(self.m, self.b, self.n_stat)

    @property
    def pole(self) -> Optional[float]:
        return -self.C / (2.0 * self.m) if self.n_stat == -1 else None

    def domain(self):
        if self.n_stat == -1:
            pole = self.pole
            return ValidityDomain(((pole, _INF),), (pole,))
        return _whole_line()

    def decay(self):
        return False, True

    def limits(self):
        if self.n_stat == 1:
            return self.amplitude, 0.0
        if self.n_stat == 0:
            return math.copysign(_INF, self.amplitude), 0.0
        return math.nan, 0.0

    def _raw(self, eta):
        m, n, K = self.m, self.n_stat, self.amplitude
        E = np.exp(2.0 * m * eta + self.C)
        v = K / (E + n)
        r = _share(E, n)
        d1 = -2.0 * m * v * r
        d2 = -4.0 * m * m * v * r * (1.0 - 2.0 * r)
        return v, d1, d2


VARIANTS = {
    cls.variant: cls
    for cls in (
        RationalBell,
        GaussBell,
        PowerBell,
        ExpProfile,
        Logistic,
        SechPulse,
        TanhKink,
        SGKink,
        BEProfileSq,
        QuantumRho,
    )
}


def from_dict(data: dict) -> ClosedFormSolution:
    """Build an entry from ``{"variant": name, **params}``."""
    data = dict(data)
    name = data.pop("variant", None)
    if name not in VARIANTS:
        raise DomainError(f"unknown catalog variant {name!r}; known: {sorted(VARIANTS)}")
    cls = VARIANTS[name]
    allowed = {f.name for f in fields(cls)}
    extra = set(data) - allowed
    if extra:
        raise DomainError(f"{name}: unexpected parameters {sorted(extra)}")
    if name == "QuantumRho" and "n_stat" in data:
        data["n_stat"] = int(data["n_stat"])
    try:
        return cls(**data)
    except TypeError as exc:
        raise DomainError(f"{name}: {exc}") from None


def canonical_entries() -> dict:
    """One entry per variant at the parameters used for soundness checks."""
    nu = 3.0
    log_D = _student_log_norm(nu)
    D = math.exp(log_D)
    return {
        "RationalBell": RationalBell(2.0 * math.pi, -4.0 * math.pi ** 2, 0.0),
        "GaussBell": GaussBell(1.0, -math.log(2.0 * math.pi), 0.0),
        "PowerBell": PowerBell(
            nu,
            (nu + 1.0) / nu * D ** (-2.0 / (nu + 1.0)),
            -((1.0 + nu) ** 2) / nu * D ** (-4.0 / (nu + 1.0)),
            0.0,
        ),
        "ExpProfile": ExpProfile(1.0, 1.0),
        "Logistic": Logistic(1.0, 1.0, 0.0),
        "SechPulse": SechPulse(1.0, 2.0, 0.0),
        "TanhKink": TanhKink(-1.0, -1.0, 0.0),
        "SGKink": SGKink(0.0),
        "BEProfileSq": BEProfileSq(1.0, 2.0, 0.0),
        "QuantumRho": QuantumRho(1.0, 1.0, 1, 0.0),
    }


def _student_log_norm(nu):
    from .numkit import lgamma

    return lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) - 0.5 * math.log(nu * math.pi)


# ---------------------------------------------------------------------------
# matcher


def _same(x, y):
    return math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-12)


def _mismatch(variant, need, got):
    raise ConstantMismatch(f"{variant} requires C1 = {need:.17g}, got {got:.17g}")


def _match_power_law(spec: PowerLaw, C1, C2):
    a, b, n = spec.a, spec.b, spec.n
    if b == 0 and _same(a, 1.0):
        if C1 < 0:
            raise ConstantMismatch(f"ExpProfile requires C1 = c^2 >= 0, got {C1:.17g}")
        c = math.sqrt(C1)
        return ExpProfile(math.exp(-c * C2), c)
    if b == 0:
        raise CatalogMiss(f"no catalog entry for {spec}")
    if _same(a, 2.0) and _same(n, 2.0):
        return RationalBell(b, C1, C2)
    if _same(a, 1.0) and _same(n, 1.0):
        return GaussBell(b, C1, C2)
    if _same(a, n) and 1.0 < a < 3.0:
        nu = (3.0 - a) / (a - 1.0)
        return PowerBell(nu, b, C1, C2)
    raise CatalogMiss(f"no catalog entry for {spec}")


def _match_general(spec: GeneralF, C1, C2):
    canon = canonicalize(spec)
    a = canon.a
    powers = {}
    sin_terms = []
    for t in canon.terms:
        if isinstance(t, PowerTerm):
            powers[t.exponent] = t.coef
        else:
            sin_terms.append(t)

    def has(*exps):
        return len(powers) == len(exps) and all(
            any(_same(e, k) for k in powers) for e in exps
        ) and not sin_terms

    def coef(e):
        return next(c for k, c in powers.items() if _same(k, e))

    if _same(a, 1.0) and has(4.0, 3.0):
        f, b = coef(4.0), -2.0 * coef(3.0)
        if not f > 0:
            raise ConstantMismatch(f"Logistic requires f > 0, got f={f}")
        need = b * b / (4.0 * f)
        if not _same(C1, need):
            _mismatch("Logistic", need, C1)
        return Logistic(f, b, C2)

    if a == 0.0 and has(2.0, 4.0):
        f, b = coef(2.0), -coef(4.0)
        if f > 0 and b > 0:
            if not _same(C1, 0.0):
                _mismatch("SechPulse", 0.0, C1)
            return SechPulse(f, b, math.sqrt(f) * C2)
        if f < 0 and b < 0:
            need = -f * f / (2.0 * b)
            if not _same(C1, need):
                _mismatch("TanhKink", need, C1)
            return TanhKink(f, b, math.sqrt(-0.5 * f) * C2)
        raise ConstantMismatch(
            f"f phi^2 - b phi^4 has catalog solutions only for f, b both > 0 or both < 0 "
            f"(got f={f}, b={b})"
        )

    if a == 0.0 and not powers and len(sin_terms) == 1 and sin_terms[0].coef == 1.0:
        if not _same(C1, 2.0):
            _mismatch("SGKink", 2.0, C1)
        return SGKink(C2)

    if a == 0.0 and has(2.0, 4.0, 6.0):
        m2, alpha, beta_sq = coef(2.0), coef(4.0), coef(6.0)
        if m2 > 0 and _same(beta_sq, 3.0 * alpha * alpha / (16.0 * m2)):
            if not _same(C1, 0.0):
                _mismatch("BEProfileSq", 0.0, C1)
            m = math.sqrt(m2)
            return BEProfileSq(m, alpha, -2.0 * m * C2)

    raise CatalogMiss(f"no catalog entry for {spec}")


def solve_catalog(spec, C1: float = 0.0, C2: float = 0.0) -> ClosedFormSolution:
    """Closed-form solution of ``spec`` with integration constants ``C1, C2``.

    ``C1`` is the first-integral constant (``C0`` for the Klein-Gordon entry,
    ignored for ``DiracReduced``); ``C2`` shifts the profile, ``eta -> eta + C2``.

    Raises
    ------
    CatalogMiss
        No pattern matches ``spec``.
    ConstantMismatch
        A pattern matches but ``C1`` (or a sign condition) is incompatible.
    """
    C1, C2 = float(C1), float(C2)
    if isinstance(spec, DiracReduced):
        return QuantumRho(spec.m, spec.b, spec.n_stat, 2.0 * spec.m * C2)
    pl = as_power_law(spec)
    if pl is not None:
        return _match_power_law(pl, C1, C2)
    return _match_general(spec, C1, C2)


def evaluate(sol: ClosedFormSolution, eta):
    """Analytic ``(value, phi', phi'')`` of ``sol`` at ``eta``."""
    return sol.evaluate(eta)


def domain(sol: ClosedFormSolution) -> ValidityDomain:
    return sol.domain()


def asymptotic_decay(sol: ClosedFormSolution) -> Tuple[bool, bool]:
    """Whether the value tends to 0 as eta -> -inf and eta -> +inf.

    An end outside the validity domain counts as not decaying.
    """
    left, right = sol.decay()
    dom = sol.domain()
    if not dom.intervals:
        return False, False
    reaches_left = math.isinf(dom.intervals[0][0])
    reaches_right = math.isinf(dom.intervals[-1][1])
    return bool(left and reaches_left), bool(right and reaches_right)
