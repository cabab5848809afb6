"""Scenario files: parsing, execution and run reports.

A scenario is a JSON object with ``"schema": 1``, a ``name``, an ``action``
and the blocks that action needs. Parsing validates every field up front so
that configuration mistakes surface as :class:`ScenarioError` (exit code 2)
before any numerics run.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import catalog as cat
from . import distbridge as dist
from . import simulate as sim
from . import verify as ver
from .core import (
    DiracReduced,
    GeneralF,
    PhiSinPhiTerm,
    PowerLaw,
    PowerTerm,
    WaveFrame,
    first_integral,
    reduce_to_ode,
)
from .errors import (
    AccuracyError,
    BranchError,
    DivergenceError,
    DomainError,
    IntegrationError,
    SolistatError,
    StabilityError,
    TrackingError,
)
from .numkit import Tolerance
from .output import Curve, emit_csv, emit_json, emit_profile_csv, emit_svg

__all__ = [
    "SCHEMA_VERSION",
    "ACTIONS",
    "DEFAULTS",
    "ScenarioError",
    "Scenario",
    "RunOptions",
    "RunReport",
    "load_scenario",
    "parse_scenario",
    "spec_from_dict",
    "spec_to_dict",
    "execute",
    "run_scenario",
]

SCHEMA_VERSION = 1
ACTIONS = ("catalog", "eval", "map", "verify", "integrate", "simulate")

# Every default a scenario can rely on. Golden outputs depend on these values.
DEFAULTS: Dict[str, Any] = {
    "grid": {"lo": -10.0, "hi": 10.0, "points": 400},
    "map_grid": {"lo": -20.0, "hi": 20.0, "points": 801},
    "grid2d": {"x": [-4.0, 4.0, 33], "t": [0.0, 1.0, 3]},
    "solver": {"abs_tol": 1e-30, "rel_tol": 1e-12},
    "integrate_points": 201,
    "sim": {
        "x_min": -40.0,
        "x_max": 40.0,
        "h": 0.05,
        "cfl": 0.5,
        "T": 20.0,
        "boundary": "periodic",
        "floor": 1e-6,
        "snapshot_stride": 20,
    },
    "tolerance": {
        "ode": 1e-9,
        "first_order": 1e-9,
        "pde": 1e-4,
        "p_transform": 1e-9,
        "lorentz": 1e-12,
        "equivalence": 1e-12,
        "closed_form": 1e-6,
        "drift": 1e-8,
        "speed": 5e-3,
        "shape": 5e-3,
        "energy": 1e-4,
    },
    "pde_h": 1e-3,
    "convergence": {"h_levels": [1e-2, 5e-3, 2.5e-3], "slope_range": [1.8, 2.2]},
}

CHECK_KINDS = ("ode", "first_order", "pde", "pde_convergence", "p_transform", "lorentz")
SIM_CHECKS = ("speed", "shape", "energy")
INTEGRATE_CHECKS = ("closed_form", "drift")


class ScenarioError(SolistatError):
    """Invalid scenario content. ``where`` is a dotted field path."""

    def __init__(self, where: str, message: str, line: Optional[int] = None):
        self.where = where
        self.line = line
        loc = where if line is None else f"line {line}, {where}"
        super().__init__(f"{loc}: {message}")


# ---------------------------------------------------------------------------
# field readers


def _num(obj, key, where, default=None, positive=False):
    if key not in obj:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "required field is missing")
        return float(default)
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"{where}.{key}", f"expected a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError(f"{where}.{key}", "must be finite")
    if positive and not val > 0:
        raise ScenarioError(f"{where}.{key}", f"must be > 0, got {val!r}")
    return val


def _int(obj, key, where, default=None, minimum=None):
    if key not in obj:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "required field is missing")
        return int(default)
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ScenarioError(f"{where}.{key}", f"expected an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ScenarioError(f"{where}.{key}", f"must be >= {minimum}, got {val}")
    return val


def _obj(obj, key, where, required=False):
    if key not in obj:
        if required:
            raise ScenarioError(f"{where}.{key}" if where else key, "required block is missing")
        return None
    val = obj[key]
    if not isinstance(val, dict):
        raise ScenarioError(f"{where}.{key}" if where else key, "expected an object")
    return val


def _no_extra(obj, allowed, where):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ScenarioError(where, f"unknown field(s) {extra}")


# ---------------------------------------------------------------------------
# blocks


def spec_from_dict(d: dict, where: str = "spec"):
    """Equation spec from ``{"type": "power_law" | "general_f" | "dirac_reduced", ...}``."""
    if not isinstance(d, dict):
        raise ScenarioError(where, "expected an object")
    kind = d.get("type")
    try:
        if kind == "power_law":
            _no_extra(d, ("type", "a", "b", "n"), where)
            return PowerLaw(_num(d, "a", where), _num(d, "b", where), _num(d, "n", where))
        if kind == "general_f":
            _no_extra(d, ("type", "a", "terms"), where)
            terms = d.get("terms")
            if not isinstance(terms, list):
                raise ScenarioError(f"{where}.terms", "expected a list of terms")
            parsed = []
            for i, t in enumerate(terms):
                tw = f"{where}.terms[{i}]"
                if not isinstance(t, dict):
                    raise ScenarioError(tw, "expected an object")
                if t.get("kind") == "power":
                    _no_extra(t, ("kind", "coef", "exponent"), tw)
                    parsed.append(PowerTerm(_num(t, "coef", tw), _num(t, "exponent", tw)))
                elif t.get("kind") == "phi_sin_phi":
                    _no_extra(t, ("kind", "coef"), tw)
                    parsed.append(PhiSinPhiTerm(_num(t, "coef", tw)))
                else:
                    raise ScenarioError(f"{tw}.kind", "expected 'power' or 'phi_sin_phi'")
            return GeneralF(_num(d, "a", where), tuple(parsed))
        if kind == "dirac_reduced":
            _no_extra(d, ("type", "m", "b", "n_stat"), where)
            return DiracReduced(_num(d, "m", where), _num(d, "b", where), _int(d, "n_stat", where))
    except ScenarioError:
        raise
    except DomainError as exc:
        raise ScenarioError(where, str(exc)) from None
    raise ScenarioError(f"{where}.type", "expected 'power_law', 'general_f' or 'dirac_reduced'")


def spec_to_dict(spec) -> dict:
    if isinstance(spec, PowerLaw):
        return {"type": "power_law", "a": spec.a, "b": spec.b, "n": spec.n}
    if isinstance(spec, DiracReduced):
        return {"type": "dirac_reduced", "m": spec.m, "b": spec.b, "n_stat": spec.n_stat}
    terms = []
    for t in spec.terms:
        if isinstance(t, PowerTerm):
            terms.append({"kind": "power", "coef": t.coef, "exponent": t.exponent})
        else:
            terms.append({"kind": "phi_sin_phi", "coef": t.coef})
    return {"type": "general_f", "a": spec.a, "terms": terms}


def _solution(d: dict, spec, where="solution"):
    if "solve" in d:
        _no_extra(d, ("solve",), where)
        if spec is None:
            raise ScenarioError(where, "'solve' needs a spec block")
        block = d["solve"]
        if not isinstance(block, dict):
            raise ScenarioError(f"{where}.solve", "expected an object")
        _no_extra(block, ("C1", "C2"), f"{where}.solve")
        C1 = _num(block, "C1", f"{where}.solve", default=0.0)
        C2 = _num(block, "C2", f"{where}.solve", default=0.0)
        try:
            return cat.solve_catalog(spec, C1, C2)
        except (DomainError, SolistatError) as exc:
            raise ScenarioError(where, str(exc)) from None
    variant = d.get("variant")
    if variant not in cat.VARIANTS:
        raise ScenarioError(f"{where}.variant", f"unknown variant {variant!r}; known: {sorted(cat.VARIANTS)}")
    params = dict(cat.canonical_entries()[variant].params())
    for key, val in d.items():
        if key == "variant":
            continue
        if key not in params:
            raise ScenarioError(f"{where}.{key}", f"not a parameter of {variant}")
        params[key] = _int(d, key, where) if key == "n_stat" else _num(d, key, where)
    try:
        return cat.from_dict({"variant": variant, **params})
    except DomainError as exc:
        raise ScenarioError(where, str(exc)) from None


def _distribution(d: dict, where="distribution"):
    try:
        for key, val in d.items():
            if key != "dist":
                _num(d, key, where)
        return dist.from_dict(d)
    except DomainError as exc:
        raise ScenarioError(where, str(exc)) from None


def _grid_block(d: Optional[dict], where: str, default: dict):
    if d is None:
        return dict(default)
    if "values" in d:
        _no_extra(d, ("values",), where)
        vals = d["values"]
        if not isinstance(vals, list) or not vals:
            raise ScenarioError(f"{where}.values", "expected a non-empty list of numbers")
        return {"values": [_num({"v": v}, "v", f"{where}.values") for v in vals]}
    _no_extra(d, ("lo", "hi", "points"), where)
    out = {
        "lo": _num(d, "lo", where, default["lo"]),
        "hi": _num(d, "hi", where, default["hi"]),
        "points": _int(d, "points", where, default["points"], minimum=1),
    }
    if not out["hi"] > out["lo"]:
        raise ScenarioError(where, "need hi > lo")
    return out


def _boundary(val, where):
    if val == "periodic":
        return "periodic"
    if val == "ends":
        return "ends"
    if isinstance(val, dict) and set(val) == {"dirichlet"}:
        pair = val["dirichlet"]
        if isinstance(pair, list) and len(pair) == 2:
            return ("dirichlet", _num({"v": pair[0]}, "v", where), _num({"v": pair[1]}, "v", where))
    raise ScenarioError(where, "expected 'periodic', 'ends' or {\"dirichlet\": [left, right]}")


# ---------------------------------------------------------------------------
# scenario


@dataclass
class Scenario:
    name: str
    action: str
    spec: Any = None
    solution: Any = None
    distribution: Any = None
    frame: Optional[WaveFrame] = None
    grid: Optional[dict] = None
    checks: List[dict] = field(default_factory=list)
    integrate: Optional[dict] = None
    sim: Optional[dict] = None
    outputs: dict = field(default_factory=dict)
    expect_exit: Optional[int] = None
    source: Optional[str] = None


_TOP_FIELDS = (
    "schema", "name", "description", "action", "spec", "solution", "distribution",
    "frame", "grid", "checks", "integrate", "sim", "outputs", "expect_exit",
)


def _tolerance(chk, kind, where):
    return _num(chk, "tolerance", where, DEFAULTS["tolerance"][kind], positive=True)


def _parse_checks(raw, action, where="checks"):
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ScenarioError(where, "expected a list of check objects")
    allowed = {
        "verify": CHECK_KINDS,
        "catalog": ("ode",),
        "map": ("equivalence",),
        "integrate": INTEGRATE_CHECKS,
        "simulate": SIM_CHECKS,
    }.get(action, ())
    out = []
    for i, chk in enumerate(raw):
        cw = f"{where}[{i}]"
        if not isinstance(chk, dict):
            raise ScenarioError(cw, "expected an object")
        kind = chk.get("kind")
        if kind not in allowed:
            raise ScenarioError(f"{cw}.kind", f"expected one of {list(allowed)} for action {action!r}")
        parsed = {"kind": kind}
        if kind == "pde":
            _no_extra(chk, ("kind", "tolerance", "u", "h"), cw)
            parsed["u"] = _num(chk, "u", cw, 0.0)
            parsed["h"] = _num(chk, "h", cw, DEFAULTS["pde_h"], positive=True)
        elif kind == "pde_convergence":
            _no_extra(chk, ("kind", "u", "h_levels", "slope_range"), cw)
            parsed["u"] = _num(chk, "u", cw, 0.0)
            levels = chk.get("h_levels", DEFAULTS["convergence"]["h_levels"])
            band = chk.get("slope_range", DEFAULTS["convergence"]["slope_range"])
            if not (isinstance(levels, list) and len(levels) >= 3):
                raise ScenarioError(f"{cw}.h_levels", "expected at least three step sizes")
            parsed["h_levels"] = [_num({"v": v}, "v", f"{cw}.h_levels", positive=True) for v in levels]
            if not (isinstance(band, list) and len(band) == 2):
                raise ScenarioError(f"{cw}.slope_range", "expected [lo, hi]")
            parsed["slope_range"] = [_num({"v": v}, "v", f"{cw}.slope_range") for v in band]
            out.append(parsed)
            continue
        elif kind == "p_transform":
            _no_extra(chk, ("kind", "tolerance", "p"), cw)
            parsed["p"] = _num(chk, "p", cw)
            if parsed["p"] == 0:
                raise ScenarioError(f"{cw}.p", "p must be nonzero")
        elif kind == "lorentz":
            _no_extra(chk, ("kind", "tolerance", "u", "w"), cw)
            parsed["u"] = _num(chk, "u", cw)
            parsed["w"] = _num(chk, "w", cw)
        elif kind == "first_order":
            _no_extra(chk, ("kind", "tolerance", "C"), cw)
            if "C" in chk:
                parsed["C"] = _num(chk, "C", cw)
        else:
            _no_extra(chk, ("kind", "tolerance"), cw)
        parsed["tolerance"] = _tolerance(chk, "pde" if kind == "pde" else kind, cw)
        for key in ("u", "w"):
            if key in parsed:
                try:
                    WaveFrame(parsed[key])
                except DomainError as exc:
                    raise ScenarioError(f"{cw}.{key}", str(exc)) from None
        out.append(parsed)
    return out


def parse_scenario(data: dict, source: Optional[str] = None) -> Scenario:
    """Validate a decoded scenario object."""
    if not isinstance(data, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    _no_extra(data, _TOP_FIELDS, "<root>")
    if data.get("schema") != SCHEMA_VERSION:
        raise ScenarioError("schema", f"expected {SCHEMA_VERSION}, got {data.get('schema')!r}")
    name = data.get("name")
    if not isinstance(name, str) or not name or any(c in name for c in "/\\") or name.startswith("."):
        raise ScenarioError("name", "expected a non-empty file-name-safe string")
    action = data.get("action")
    if action not in ACTIONS:
        raise ScenarioError("action", f"expected one of {list(ACTIONS)}, got {action!r}")

    sc = Scenario(name=name, action=action, source=source)
    if "spec" in data:
        sc.spec = spec_from_dict(data["spec"], "spec")
    sol_block = _obj(data, "solution", "")
    if sol_block is not None:
        sc.solution = _solution(sol_block, sc.spec)
    dist_block = _obj(data, "distribution", "")
    if dist_block is not None:
        sc.distribution = _distribution(dist_block)
    frame_block = _obj(data, "frame", "")
    if frame_block is not None:
        _no_extra(frame_block, ("u",), "frame")
        try:
            sc.frame = WaveFrame(_num(frame_block, "u", "frame", 0.0))
        except DomainError as exc:
            raise ScenarioError("frame.u", str(exc)) from None

    grid_default = DEFAULTS["map_grid"] if action == "map" else DEFAULTS["grid"]
    sc.grid = _grid_block(_obj(data, "grid", ""), "grid", grid_default)
    checks = _parse_checks(data.get("checks"), action)

    if "expect_exit" in data:
        sc.expect_exit = _int(data, "expect_exit", "<root>")
        if sc.expect_exit not in (0, 1, 2):
            raise ScenarioError("expect_exit", "must be 0, 1 or 2")
    outputs = _obj(data, "outputs", "") or {}
    _no_extra(outputs, ("csv", "svg"), "outputs")
    for key in outputs:
        if not isinstance(outputs[key], bool):
            raise ScenarioError(f"outputs.{key}", "expected true or false")
    sc.outputs = {"csv": outputs.get("csv", True), "svg": outputs.get("svg", False)}

    needs = {
        "eval": ("solution",),
        "map": ("distribution",),
        "verify": ("solution",),
        "simulate": ("solution",),
    }.get(action, ())
    for block in needs:
        if getattr(sc, block) is None:
            raise ScenarioError(block, f"required by action {action!r}")

    if action == "catalog":
        sc.checks = checks if checks is not None else [{"kind": "ode", "tolerance": DEFAULTS["tolerance"]["ode"]}]
    elif action == "verify":
        sc.checks = checks if checks is not None else [{"kind": "ode", "tolerance": DEFAULTS["tolerance"]["ode"]}]
    elif action == "map":
        sc.checks = checks if checks is not None else [
            {"kind": "equivalence", "tolerance": DEFAULTS["tolerance"]["equivalence"]}
        ]
    elif action == "integrate":
        sc.integrate = _parse_integrate(_obj(data, "integrate", "", required=True), sc)
        default = [{"kind": k, "tolerance": DEFAULTS["tolerance"][k]} for k in INTEGRATE_CHECKS]
        if sc.solution is None:
            default = default[1:]
        sc.checks = checks if checks is not None else default
        if sc.solution is None and any(c["kind"] == "closed_form" for c in sc.checks):
            raise ScenarioError("checks", "closed_form needs a solution block")
    elif action == "simulate":
        sc.sim = _parse_sim(_obj(data, "sim", "") or {})
        if sc.frame is None:
            sc.frame = WaveFrame(0.0)
        sc.checks = checks if checks is not None else [
            {"kind": k, "tolerance": DEFAULTS["tolerance"][k]} for k in SIM_CHECKS
        ]
    else:
        sc.checks = checks or []

    spec = sc.spec if sc.spec is not None else (sc.solution.spec if sc.solution is not None else None)
    if action in ("integrate", "simulate") and isinstance(spec, DiracReduced):
        raise ScenarioError("spec", f"action {action!r} needs a wave-equation spec, not dirac_reduced")
    if action == "integrate" and spec is None:
        raise ScenarioError("spec", "integrate needs a spec or a solution block")
    return sc


def _parse_integrate(block, sc: Scenario) -> dict:
    w = "integrate"
    _no_extra(block, ("eta0", "phi0", "dphi0", "span", "solver", "points", "floor"), w)
    out = {}
    if "eta0" in block:
        if sc.solution is None:
            raise ScenarioError(f"{w}.eta0", "eta0 starts from a solution block; none given")
        if "phi0" in block or "dphi0" in block:
            raise ScenarioError(w, "give either eta0 or phi0/dphi0, not both")
        out["eta0"] = _num(block, "eta0", w)
    else:
        out["phi0"] = _num(block, "phi0", w)
        out["dphi0"] = _num(block, "dphi0", w)
    span = block.get("span")
    if not (isinstance(span, list) and len(span) == 2):
        raise ScenarioError(f"{w}.span", "expected [start, end]")
    out["span"] = [_num({"v": v}, "v", f"{w}.span") for v in span]
    if out["span"][0] == out["span"][1]:
        raise ScenarioError(f"{w}.span", "span has zero length")
    if "eta0" in out and out["eta0"] != out["span"][0]:
        raise ScenarioError(f"{w}.eta0", "must equal span[0]")
    solver = block.get("solver", {})
    if not isinstance(solver, dict):
        raise ScenarioError(f"{w}.solver", "expected an object")
    _no_extra(solver, ("abs_tol", "rel_tol"), f"{w}.solver")
    out["abs_tol"] = _num(solver, "abs_tol", f"{w}.solver", DEFAULTS["solver"]["abs_tol"], positive=True)
    out["rel_tol"] = _num(solver, "rel_tol", f"{w}.solver", DEFAULTS["solver"]["rel_tol"], positive=True)
    out["points"] = _int(block, "points", w, DEFAULTS["integrate_points"], minimum=2)
    out["floor"] = _num(block, "floor", w, 1e-10, positive=True)
    return out


def _parse_sim(block) -> dict:
    w = "sim"
    base = DEFAULTS["sim"]
    _no_extra(block, tuple(base), w)
    out = {k: _num(block, k, w, base[k]) for k in ("x_min", "x_max", "h", "cfl", "T", "floor")}
    out["snapshot_stride"] = _int(block, "snapshot_stride", w, base["snapshot_stride"], minimum=1)
    out["boundary"] = _boundary(block.get("boundary", base["boundary"]), f"{w}.boundary")
    try:
        sim.SimConfig(
            out["x_min"], out["x_max"], out["h"], out["cfl"], out["T"],
            sim.Periodic(), out["floor"], out["snapshot_stride"],
        )
    except DomainError as exc:
        raise ScenarioError(w, str(exc)) from None
    return out


def _line_of(text: str, where: str) -> Optional[int]:
    """Best-effort line number of the last key in a dotted field path."""
    key = where.split(".")[-1].split("[")[0]
    if not key or key.startswith("<"):
        return None
    idx = text.find(f'"{key}"')
    return None if idx < 0 else text.count("\n", 0, idx) + 1


def _reject_duplicates(pairs):
    out = {}
    for key, val in pairs:
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = val
    return out


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file.

    Raises
    ------
    ScenarioError
        For unreadable files, malformed JSON (with line and column) and
        schema violations (with the offending field path).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read: {exc.strerror or exc}") from None
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}", f"column {exc.colno}: {exc.msg}", line=exc.lineno) from None
    except ValueError as exc:
        raise ScenarioError(f"{path}", str(exc)) from None
    try:
        return parse_scenario(data, source=str(path))
    except ScenarioError as exc:
        line = _line_of(text, exc.where)
        raise ScenarioError(f"{path}: {exc.where}", str(exc).split(": ", 1)[-1], line=line) from None


# ---------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class RunOptions:
    out_dir: Path = Path("out")
    tol: Optional[float] = None
    paper_constants: bool = False
    svg: bool = False
    timing: bool = False


@dataclass
class RunReport:
    scenario: str
    checks: List[dict]
    diagnostics: dict
    wall_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "checks": self.checks,
            "diagnostics": self.diagnostics,
            "pass": self.passed,
            "wall_ms": self.wall_ms,
        }


def _check_entry(name, max_abs, max_rel, argmax, grid, tolerance, passed, detail=None) -> dict:
    return {
        "name": name,
        "max_abs": max_abs,
        "max_rel": max_rel,
        "argmax": argmax,
        "grid": grid,
        "tolerance": tolerance,
        "pass": bool(passed),
        "detail": detail or {},
    }


def _from_residual(rep: ver.ResidualReport, detail=None) -> dict:
    d = rep.to_dict()
    return _check_entry(d["name"], d["max_abs"], d["max_rel"], d["argmax"], d["grid"],
                        d["tolerance"], d["pass"], detail)


def _tol(chk, opts: RunOptions):
    return opts.tol if opts.tol is not None else chk.get("tolerance")


def _eval_grid(sc: Scenario, sol) -> np.ndarray:
    g = sc.grid
    if "values" in g:
        return np.asarray(g["values"], dtype=float)
    return sol.domain().grid(g["lo"], g["hi"], g["points"])


def _grid2d():
    x = np.linspace(*DEFAULTS["grid2d"]["x"])
    t = np.linspace(*DEFAULTS["grid2d"]["t"])
    return x, t


def _domain_info(sol) -> dict:
    dom = sol.domain()
    lim = sol.limits()
    dec = cat.asymptotic_decay(sol)
    return {
        "intervals": [list(iv) for iv in dom.intervals],
        "singularities": list(dom.singularities),
        "limits": list(lim),
        "decays": list(dec),
    }


def _profile_outputs(sc, opts, out, sol, grid, extra_curves=()):
    phi, dphi, ddphi = sol.evaluate(grid)
    files = []
    if sc.outputs["csv"]:
        files.append(emit_profile_csv(out / "profile.csv", grid, phi, dphi, ddphi))
    if sc.outputs["svg"] or opts.svg:
        curves = [Curve(sol.variant, grid, phi), *extra_curves]
        files.append(emit_svg(curves, out / "profile.svg", title=sc.name, xlabel="eta", ylabel="value"))
    return files


def _run_catalog(sc, opts, out):
    entries = [sc.solution] if sc.solution is not None else list(cat.canonical_entries().values())
    checks, listing = [], []
    for sol in entries:
        info = {"variant": sol.variant, "params": sol.params(), "spec": spec_to_dict(sol.spec)}
        info.update(_domain_info(sol))
        listing.append(info)
        for chk in sc.checks:
            rep = ver.ode_residual(sol, grid=sol.domain().grid(), tolerance=_tol(chk, opts))
            entry = _from_residual(rep)
            entry["name"] = f"ode_residual[{sol.variant}]"
            checks.append(entry)
    emit_json({"entries": listing}, out / "catalog.json")
    return checks, {"entries": len(listing)}


def _run_eval(sc, opts, out):
    sol = sc.solution
    grid = _eval_grid(sc, sol)
    _profile_outputs(sc, opts, out, sol, grid)
    diag = {"variant": sol.variant, "params": sol.params(), "points": int(grid.size)}
    diag.update(_domain_info(sol))
    return [], diag


def _run_map(sc, opts, out):
    d = sc.distribution
    spec, C1, C2 = dist.to_soliton(d, paper_constants=opts.paper_constants)
    sol = cat.solve_catalog(spec, C1, C2)
    g = sc.grid
    if "values" in g:
        grid = np.asarray(g["values"], dtype=float)
    else:
        lo = g["lo"]
        if isinstance(d, dist.Exponential):
            lo = max(lo, 0.0)
        grid = sol.domain().grid(lo, g["hi"], g["points"])
    checks = []
    for chk in sc.checks:
        rep = dist.equivalence_report(d, sol, grid, tolerance=_tol(chk, opts))
        checks.append(
            _check_entry(
                "equivalence", rep.max_abs, rep.max_abs, rep.argmax,
                f"{rep.points} points on [{grid.min():.6g}, {grid.max():.6g}]",
                rep.tolerance, rep.passed,
            )
        )
    diag = {
        "distribution": dist.to_dict(d),
        "spec": spec_to_dict(spec),
        "C1": C1,
        "C2": C2,
        "solution": sol.to_dict(),
        "paper_constants": opts.paper_constants,
    }
    try:
        diag["normalization"] = dist.normalization(sol)
    except DivergenceError as exc:
        diag["normalization"] = None
        diag["normalization_note"] = str(exc)
    ref = dist.pdf(d, grid)
    _profile_outputs(sc, opts, out, sol, grid, extra_curves=(Curve(f"{d.name} pdf", grid, ref),))
    return checks, diag


def _run_verify(sc, opts, out):
    sol = sc.solution
    spec = sc.spec
    grid = _eval_grid(sc, sol)
    checks = []
    for chk in sc.checks:
        kind, tol = chk["kind"], _tol(chk, opts)
        if kind == "ode":
            checks.append(_from_residual(ver.ode_residual(sol, spec=spec, grid=grid, tolerance=tol)))
        elif kind == "first_order":
            fi = None
            if spec is not None or "C" in chk:
                C = chk.get("C", sol.integration_constant or 0.0)
                fi = first_integral(spec if spec is not None else sol.spec, C)
            checks.append(_from_residual(ver.first_order_residual(sol, fi=fi, grid=grid, tolerance=tol)))
        elif kind == "pde":
            rep = ver.pde_residual(sol, WaveFrame(chk["u"]), spec=spec, grid2d=_grid2d(), h=chk["h"], tolerance=tol)
            checks.append(_from_residual(rep))
        elif kind == "p_transform":
            use = spec if spec is not None else sol.spec
            if not isinstance(use, PowerLaw):
                raise ScenarioError(f"checks[{sc.checks.index(chk)}]", "p_transform needs a power_law spec")
            checks.append(_from_residual(ver.check_p_transform(use, sol, chk["p"], grid=grid, tolerance=tol)))
        elif kind == "lorentz":
            rep = ver.lorentz_profile_check(sol, chk["u"], chk["w"], grid2d=_grid2d(), tolerance=tol)
            checks.append(_from_residual(rep))
        elif kind == "pde_convergence":
            frame = WaveFrame(chk["u"])
            x2, t2 = _grid2d()

            def residual(h, frame=frame):
                return ver.pde_residual(sol, frame, spec=spec, grid2d=(x2, t2), h=h, tolerance=1.0).max_abs

            conv = ver.convergence_order(residual, chk["h_levels"])
            lo, hi = chk["slope_range"]
            ok = conv.slope is not None and lo <= conv.slope <= hi
            gap = math.inf if conv.slope is None else abs(conv.slope - 0.5 * (lo + hi))
            checks.append(
                _check_entry(
                    "pde_convergence", gap, gap, None,
                    f"h in {list(conv.h_levels)}, u={frame.u:g}", 0.5 * (hi - lo), ok,
                    {"slope": conv.slope, "errors": list(conv.errors), "slope_range": [lo, hi]},
                )
            )
    if sc.outputs["csv"] or sc.outputs["svg"] or opts.svg:
        _profile_outputs(sc, opts, out, sol, grid)
    diag = {"variant": sol.variant, "params": sol.params(), "spec": spec_to_dict(spec or sol.spec)}
    return checks, diag


def _run_integrate(sc, opts, out):
    cfg = sc.integrate
    sol = sc.solution
    spec = sc.spec if sc.spec is not None else sol.spec
    ode = reduce_to_ode(spec, sc.frame or WaveFrame(0.0))
    if "eta0" in cfg:
        phi0, dphi0, _ = sol.field(cfg["eta0"])
    else:
        phi0, dphi0 = cfg["phi0"], cfg["dphi0"]
    lo, hi = cfg["span"]
    t_eval = np.linspace(lo, hi, cfg["points"])
    tol = Tolerance(cfg["abs_tol"], cfg["rel_tol"])
    res = sim.integrate_profile(ode, float(phi0), float(dphi0), (lo, hi), tol=tol, floor=cfg["floor"], t_eval=t_eval)
    eta, phi = res.eta, res.phi
    desc = f"{eta.size} points on [{min(lo, hi):.6g}, {max(lo, hi):.6g}]"
    checks = []
    for chk in sc.checks:
        kind, ctol = chk["kind"], _tol(chk, opts)
        if kind == "closed_form":
            ref = sol.field(eta)[0]
            gap = np.abs(phi - ref)
            i = int(np.argmax(gap))
            checks.append(_check_entry("closed_form", float(gap[i]), float(gap[i] / max(abs(ref[i]), 1e-300)),
                                       float(eta[i]), desc, ctol, gap[i] < ctol))
        elif kind == "drift":
            drift = ver.conserved_quantity_drift(spec, res.samples)
            Q = ver.invariant_along(spec, res.samples)
            checks.append(_check_entry("conserved_drift", drift, drift / max(abs(float(Q[0])), 1.0), None,
                                       desc, ctol, drift < ctol, {"Q0": float(Q[0])}))
    if res.stop_reason != "span_end":
        checks.append(_check_entry("reached_span_end", None, None, res.stop_eta, desc, None, False,
                                   {"stop_reason": res.stop_reason}))
    if sc.outputs["csv"]:
        emit_csv(res, out / "profile.csv")
    if sc.outputs["svg"] or opts.svg:
        curves = [Curve("integrated", eta, phi)]
        if sol is not None:
            curves.append(Curve(f"{sol.variant} closed form", eta, sol.field(eta)[0]))
        emit_svg(curves, out / "profile.svg", title=sc.name, xlabel="eta", ylabel="phi")
    diag = {
        "spec": spec_to_dict(spec),
        "phi0": float(phi0),
        "dphi0": float(dphi0),
        "stop_reason": res.stop_reason,
        "stop_eta": res.stop_eta,
        "samples": int(eta.size),
    }
    return checks, diag


def _run_simulate(sc, opts, out):
    sol, frame, s = sc.solution, sc.frame, sc.sim
    spec = sc.spec if sc.spec is not None else sol.spec
    probe = sim.SimConfig(s["x_min"], s["x_max"], s["h"], s["cfl"], s["T"], sim.Dirichlet(0.0, 0.0),
                          s["floor"], s["snapshot_stride"])
    kind = s["boundary"]
    if kind == "periodic":
        boundary = sim.Periodic()
    elif kind == "ends":
        first = sim.init_from_solution(sol, frame, probe)
        boundary = sim.Dirichlet(float(first.phi[0]), float(first.phi[-1]))
    else:
        boundary = sim.Dirichlet(kind[1], kind[2])
    cfg = sim.SimConfig(s["x_min"], s["x_max"], s["h"], s["cfl"], s["T"], boundary,
                        s["floor"], s["snapshot_stride"])
    state = sim.init_from_solution(sol, frame, cfg)
    result = sim.run(spec, state, cfg)
    snaps = result.snapshots
    diag = dict(result.diagnostics)
    desc = f"{snaps[0].phi.size} nodes, h={cfg.h:g}, T={cfg.T:g}"
    checks = []
    for chk in sc.checks:
        kind, ctol = chk["kind"], _tol(chk, opts)
        if kind == "speed":
            u_est = sim.measure_speed(snaps)
            err = abs(u_est - frame.u)
            diag["u_est"] = u_est
            checks.append(_check_entry("speed", err, err / max(abs(frame.u), 1e-300) if frame.u else None,
                                       None, desc, ctol, err < ctol, {"u_est": u_est, "u": frame.u}))
        elif kind == "shape":
            errs = [sim.shape_error(sn, sol, frame) for sn in snaps]
            i = int(np.argmax(errs))
            checks.append(_check_entry("shape", errs[i], errs[i], snaps[i].t, desc, ctol, errs[i] < ctol))
        elif kind == "energy":
            if "energy_drift_rel" not in diag:
                raise ScenarioError("checks", "energy check needs a semilinear (a = 0) spec")
            drift = diag["energy_drift_rel"]
            checks.append(_check_entry("energy_drift", abs(diag["energy_final"] - diag["energy_initial"]),
                                       drift, None, desc, ctol, drift < ctol))
    if sc.outputs["csv"]:
        emit_csv(snaps, out / "snapshots.csv")
    if sc.outputs["svg"] or opts.svg:
        picks = sorted({0, len(snaps) // 2, len(snaps) - 1})
        curves = [Curve(f"t={snaps[i].t:.4g}", snaps[i].x, snaps[i].phi) for i in picks]
        emit_svg(curves, out / "snapshots.svg", title=sc.name, xlabel="x", ylabel="phi")
    diag["boundary"] = "periodic" if cfg.periodic else [cfg.boundary.left, cfg.boundary.right]
    return checks, diag


_RUNNERS = {
    "catalog": _run_catalog,
    "eval": _run_eval,
    "map": _run_map,
    "verify": _run_verify,
    "integrate": _run_integrate,
    "simulate": _run_simulate,
}

# numerical failures: the scenario ran but a check could not be completed
_NUMERICAL = (BranchError, StabilityError, IntegrationError, AccuracyError, DivergenceError, TrackingError)


def execute(sc: Scenario, opts: RunOptions = RunOptions()) -> Tuple[RunReport, int]:
    """Run a parsed scenario, write its outputs and return ``(report, exit_code)``.

    Exit codes: 0 all checks pass, 1 a check failed or a numerical failure
    occurred, 2 invalid configuration detected while running.
    """
    out = Path(opts.out_dir) / sc.name
    start = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
        checks, diag = _RUNNERS[sc.action](sc, opts, out)
    except _NUMERICAL as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        checks = [_check_entry("error", None, None, getattr(exc, "eta", None), None, None, False, err)]
        diag = {"error": err}
    elapsed = (time.perf_counter() - start) * 1000.0
    diag = {"action": sc.action, **diag}
    report = RunReport(sc.name, checks, diag, round(elapsed, 3) if opts.timing else None)
    emit_json(report.to_dict(), out / "report.json")
    return report, 0 if report.passed else 1


def run_scenario(path, opts: RunOptions = RunOptions()) -> Tuple[Optional[RunReport], int, str]:
    """Load, run and classify one scenario file.

    Returns ``(report, exit_code, message)``; ``report`` is None when the
    scenario was rejected (exit 2) and ``message`` then holds the diagnostic.
    """
    try:
        sc = load_scenario(path)
        report, code = execute(sc, opts)
    except (ScenarioError, DomainError, SolistatError, OSError) as exc:
        return None, 2, str(exc)
    status = "PASS" if code == 0 else "FAIL"
    return report, code, f"{status} {report.scenario}"
