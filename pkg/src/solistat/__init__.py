"""solistat: soliton profiles of a quasilinear Klein-Gordon family, their
links to probability densities, and the numerical tools used to check them.

Submodules
----------
numkit      quadrature, adaptive ODE solver, log-gamma
core        equation specs, traveling-wave reduction, first integrals
catalog     closed-form solutions with validity domains
distbridge  densities and their soliton counterparts
verify      residual and invariance checks
simulate    profile integration and PDE time stepping
scenario    scenario files and run reports (used by the CLI)
"""

from . import catalog, core, distbridge, numkit, simulate, verify
from .catalog import canonical_entries, solve_catalog
from .core import (
    DiracReduced,
    GeneralF,
    PhiSinPhiTerm,
    PowerLaw,
    PowerTerm,
    WaveFrame,
    reduce_to_ode,
)
from .errors import (
    BranchError,
    DomainError,
    FrameError,
    SolistatError,
    StabilityError,
    UnsupportedFormError,
)
from .numkit import Tolerance

__version__ = "0.1.0"

__all__ = [
    "catalog",
    "core",
    "distbridge",
    "numkit",
    "simulate",
    "verify",
    "canonical_entries",
    "solve_catalog",
    "DiracReduced",
    "GeneralF",
    "PhiSinPhiTerm",
    "PowerLaw",
    "PowerTerm",
    "WaveFrame",
    "reduce_to_ode",
    "BranchError",
    "DomainError",
    "FrameError",
    "SolistatError",
    "StabilityError",
    "UnsupportedFormError",
    "Tolerance",
    "__version__",
]
