"""Textbook densities and their maps onto soliton solutions.

The densities double as independent oracles: :func:`pdf` never goes through
the catalog, so comparing it with a mapped catalog entry checks the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import ClassVar, Tuple, Union

import numpy as np

from .catalog import ClosedFormSolution, ExpProfile, asymptotic_decay, solve_catalog
from .core import DiracReduced, PowerLaw
from .errors import DivergenceError, DomainError
from .numkit import Tolerance, integrate_half_line, integrate_real_line, lgamma

__all__ = [
    "Cauchy",
    "Normal",
    "StudentT",
    "Exponential",
    "FermiDirac",
    "BoseEinstein",
    "MaxwellBoltzmann",
    "DISTRIBUTIONS",
    "pdf",
    "to_soliton",
    "soliton_for",
    "equivalence_report",
    "EquivalenceReport",
    "normalization",
    "student_t_log_norm",
    "from_dict",
]


def _positive(name, **vals):
    for key, val in vals.items():
        if not (math.isfinite(val) and val > 0):
            raise DomainError(f"{name}: {key} must be finite and > 0, got {val!r}")


@dataclass(frozen=True)
class Cauchy:
    mu: float = 0.0
    lam: float = 1.0
    name: ClassVar[str] = "cauchy"

    def __post_init__(self):
        _positive("Cauchy", lam=self.lam)


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0
    name: ClassVar[str] = "normal"

    def __post_init__(self):
        _positive("Normal", sigma=self.sigma)


@dataclass(frozen=True)
class StudentT:
    nu: float = 1.0
    name: ClassVar[str] = "student_t"

    def __post_init__(self):
        _positive("StudentT", nu=self.nu)


@dataclass(frozen=True)
class Exponential:
    c: float = 1.0
    name: ClassVar[str] = "exponential"

    def __post_init__(self):
        _positive("Exponential", c=self.c)


@dataclass(frozen=True)
class FermiDirac:
    """Occupation shape ``(m/b) / (exp(2 m x) + 1)``."""

    m: float = 1.0
    b: float = 1.0
    name: ClassVar[str] = "fermi_dirac"

    def __post_init__(self):
        _positive("FermiDirac", m=self.m, b=self.b)


@dataclass(frozen=True)
class BoseEinstein:
    """Occupation shape ``(m/b) / (exp(2 m x) - 1)``, x > 0."""

    m: float = 1.0
    b: float = 1.0
    name: ClassVar[str] = "bose_einstein"

    def __post_init__(self):
        _positive("BoseEinstein", m=self.m, b=self.b)


@dataclass(frozen=True)
class MaxwellBoltzmann:
    """Occupation shape ``amplitude * exp(-2 m x)``."""

    m: float = 1.0
    amplitude: float = 1.0
    name: ClassVar[str] = "maxwell_boltzmann"

    def __post_init__(self):
        _positive("MaxwellBoltzmann", m=self.m, amplitude=self.amplitude)


DistributionSpec = Union[
    Cauchy, Normal, StudentT, Exponential, FermiDirac, BoseEinstein, MaxwellBoltzmann
]

DISTRIBUTIONS = {
    cls.name: cls
    for cls in (Cauchy, Normal, StudentT, Exponential, FermiDirac, BoseEinstein, MaxwellBoltzmann)
}

# scenario files spell the Cauchy scale "lambda"
_ALIASES = {"lambda": "lam"}


def from_dict(data: dict) -> DistributionSpec:
    data = dict(data)
    name = data.pop("dist", None)
    if name not in DISTRIBUTIONS:
        raise DomainError(f"unknown distribution {name!r}; known: {sorted(DISTRIBUTIONS)}")
    cls = DISTRIBUTIONS[name]
    kwargs = {_ALIASES.get(k, k): v for k, v in data.items()}
    allowed = {f.name for f in fields(cls)}
    extra = set(kwargs) - allowed
    if extra:
        raise DomainError(f"{name}: unexpected parameters {sorted(extra)}")
    return cls(**{k: float(v) for k, v in kwargs.items()})


def to_dict(dist) -> dict:
    out = {"dist": dist.name}
    for f in fields(dist):
        out["lambda" if f.name == "lam" else f.name] = getattr(dist, f.name)
    return out


def student_t_log_norm(nu: float) -> float:
    """log D with D = Gamma((nu+1)/2) / (sqrt(nu pi) Gamma(nu/2))."""
    return lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) - 0.5 * math.log(nu * math.pi)


def _support_check(dist, x):
    x = np.asarray(x, dtype=float)
    if isinstance(dist, Exponential) and np.any(x < 0):
        raise DomainError("Exponential density is supported on x >= 0")
    if isinstance(dist, BoseEinstein) and np.any(x <= 0):
        raise DomainError("Bose-Einstein profile diverges at x = 0; support is x > 0")
    return x


def pdf(dist: DistributionSpec, x):
    """Density (or occupation profile for FD/BE/MB) at ``x``."""
    x = _support_check(dist, x)
    if isinstance(dist, Cauchy):
        d = x - dist.mu
        out = dist.lam / (math.pi * (d * d + dist.lam * dist.lam))
    elif isinstance(dist, Normal):
        z = (x - dist.mu) / dist.sigma
        out = np.exp(-0.5 * z * z) / (dist.sigma * math.sqrt(2.0 * math.pi))
    elif isinstance(dist, StudentT):
        nu = dist.nu
        out = np.exp(student_t_log_norm(nu) - 0.5 * (nu + 1.0) * np.log1p(x * x / nu))
    elif isinstance(dist, Exponential):
        out = dist.c * np.exp(-dist.c * x)
    elif isinstance(dist, FermiDirac):
        out = (dist.m / dist.b) / (np.exp(2.0 * dist.m * x) + 1.0)
    elif isinstance(dist, BoseEinstein):
        out = (dist.m / dist.b) / np.expm1(2.0 * dist.m * x)
    elif isinstance(dist, MaxwellBoltzmann):
        out = dist.amplitude * np.exp(-2.0 * dist.m * x)
    else:
        raise DomainError(f"unknown distribution {dist!r}")
    return float(out) if np.ndim(out) == 0 else out


def to_soliton(dist: DistributionSpec, paper_constants: bool = False) -> Tuple[object, float, float]:
    """Equation and integration constants whose catalog solution is ``dist``.

    Returns ``(spec, C1, C2)`` for :func:`solistat.catalog.solve_catalog`.

    With ``paper_constants=True`` the Normal map uses the legacy constant
    ``C1 = ln(1/(sigma sqrt(2 pi))) / sigma^2``, which halves the log-prefactor;
    the default ``2 ln(1/(sigma sqrt(2 pi))) / sigma^2`` reproduces the density.
    """
    if isinstance(dist, Cauchy):
        return PowerLaw(2.0, 2.0 * math.pi / dist.lam, 2.0), -4.0 * math.pi ** 2, -dist.mu
    if isinstance(dist, Normal):
        b = 1.0 / dist.sigma ** 2
        log_peak = -math.log(dist.sigma * math.sqrt(2.0 * math.pi))
        C1 = b * log_peak if paper_constants else 2.0 * b * log_peak
        return PowerLaw(1.0, b, 1.0), C1, -dist.mu
    if isinstance(dist, StudentT):
        nu = dist.nu
        log_D = student_t_log_norm(nu)
        a = (nu + 3.0) / (nu + 1.0)
        b = (nu + 1.0) / nu * math.exp(-2.0 * log_D / (nu + 1.0))
        C1 = -((1.0 + nu) ** 2) / nu * math.exp(-4.0 * log_D / (nu + 1.0))
        return PowerLaw(a, b, a), C1, 0.0
    if isinstance(dist, Exponential):
        c = dist.c
        # ExpProfile{C0, c}: C1 = c^2 fixes the rate, C2 = -ln(C0)/c the height
        return PowerLaw(1.0, 0.0, 1.0), c * c, -math.log(c) / c
    if isinstance(dist, FermiDirac):
        return DiracReduced(dist.m, dist.b, 1), 0.0, 0.0
    if isinstance(dist, BoseEinstein):
        return DiracReduced(dist.m, dist.b, -1), 0.0, 0.0
    if isinstance(dist, MaxwellBoltzmann):
        return DiracReduced(dist.m, dist.m / dist.amplitude, 0), 0.0, 0.0
    raise DomainError(f"unknown distribution {dist!r}")


def soliton_for(dist: DistributionSpec, paper_constants: bool = False) -> ClosedFormSolution:
    """Shortcut: :func:`to_soliton` followed by :func:`solve_catalog`."""
    spec, C1, C2 = to_soliton(dist, paper_constants)
    return solve_catalog(spec, C1, C2)


@dataclass(frozen=True)
class EquivalenceReport:
    max_abs: float
    argmax: float
    points: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs < self.tolerance


def equivalence_report(
    dist: DistributionSpec, sol: ClosedFormSolution, grid, tolerance: float = 1e-12
) -> EquivalenceReport:
    """Largest pointwise gap between ``pdf(dist)`` and the soliton value on ``grid``."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise DomainError("equivalence_report needs a non-empty grid")
    ref = np.asarray(pdf(dist, grid), dtype=float)
    val = np.asarray(sol.evaluate(grid)[0], dtype=float)
    gap = np.abs(ref - val)
    i = int(np.argmax(gap))
    return EquivalenceReport(float(gap[i]), float(grid[i]), int(grid.size), float(tolerance))


def normalization(obj, tol: Tolerance = Tolerance(1e-10, 1e-10)) -> float:
    """Total mass of a density or soliton profile.

    Exponential densities and ``ExpProfile`` are integrated over ``[0, inf)``,
    everything else over the real line.

    Raises
    ------
    DivergenceError
        For the FD/BE/MB occupation shapes and for profiles that do not decay
        at both ends of their integration range.
    """
    if isinstance(obj, (FermiDirac, BoseEinstein, MaxwellBoltzmann)):
        raise DivergenceError(f"{obj.name} profile is not integrable over the real line")
    if isinstance(obj, Exponential):
        return integrate_half_line(lambda x: pdf(obj, x), tol)
    if isinstance(obj, (Cauchy, Normal, StudentT)):
        return integrate_real_line(lambda x: pdf(obj, x), tol)
    if isinstance(obj, ExpProfile):
        if not obj.c > 0:
            raise DivergenceError("ExpProfile with c <= 0 does not decay on [0, inf)")
        return integrate_half_line(lambda x: obj.evaluate(x, check=False)[0], tol)
    if isinstance(obj, ClosedFormSolution):
        left, right = asymptotic_decay(obj)
        dom = obj.domain()
        if not (left and right) or len(dom.intervals) != 1:
            raise DivergenceError(f"{obj.variant} profile is not integrable over the real line")
        return integrate_real_line(lambda x: obj.evaluate(x, check=False)[0], tol)
    raise DomainError(f"cannot normalize {obj!r}")
