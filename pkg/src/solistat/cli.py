"""Command-line front end.

Every command builds (or loads) a scenario and runs it through the same
engine, so ``solistat eval TanhKink`` and a scenario file with
``"action": "eval"`` produce identical outputs.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import List, Optional

from .output import dumps, emit_json
from .scenario import (
    RunOptions,
    ScenarioError,
    execute,
    parse_scenario,
    run_scenario,
)
from .errors import DomainError, SolistatError

__all__ = ["main", "build_parser", "bundled_scenarios"]

OUT_DIR_ENV = "SOLISTAT_OUT_DIR"


def bundled_scenarios() -> Path:
    return Path(str(resources.files("solistat").joinpath("scenarios")))


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=float, default=d(None),
                   help="override the tolerance of every check")
    p.add_argument("--paper-constants", action="store_true", default=d(False),
                   help="use the legacy Normal-map constant (halved log-prefactor)")
    p.add_argument("--out-dir", default=d(None),
                   help=f"output directory (default: ${OUT_DIR_ENV} or ./out)")
    p.add_argument("--svg", action="store_true", default=d(False), help="also write SVG plots")
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="record wall time in reports (makes them non-reproducible)")
    p.add_argument("--json", action="store_true", default=d(False),
                   help="print the full report JSON instead of a status line")


def _kv(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, val = text.split("=", 1)
    try:
        num = int(val) if key == "n_stat" else float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{key}: not a number: {val!r}") from None
    return key, num


def _grid_arg(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected lo,hi,points")
    try:
        return {"lo": float(parts[0]), "hi": float(parts[1]), "points": int(parts[2])}
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}") from None


def _check_arg(text: str):
    """``kind`` or ``kind:key=value,key=value``."""
    kind, _, rest = text.partition(":")
    out = {"kind": kind}
    if rest:
        for item in rest.split(","):
            key, val = _kv(item)
            out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solistat",
        description="Closed-form solitons, their distribution shapes, and numerical checks.",
    )
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_globals(p, suppress=True)
        return p

    def solution_args(p, required=True):
        p.add_argument("variant", nargs=None if required else "?", help="catalog variant name")
        p.add_argument("-p", "--param", type=_kv, action="append", default=[],
                       help="solution parameter key=value (unset ones keep canonical values)")

    p = add("catalog", "list catalog entries and check their profile equations")
    solution_args(p, required=False)

    p = add("eval", "evaluate a catalog entry on a grid")
    solution_args(p)
    p.add_argument("--grid", type=_grid_arg, help="lo,hi,points")

    p = add("map", "map a distribution onto its soliton and compare pointwise")
    p.add_argument("dist", help="distribution name, e.g. cauchy, normal, student_t")
    p.add_argument("-p", "--param", type=_kv, action="append", default=[],
                   help="distribution parameter key=value")
    p.add_argument("--grid", type=_grid_arg, help="lo,hi,points")

    p = add("verify", "residual checks for a catalog entry")
    solution_args(p)
    p.add_argument("--check", type=_check_arg, action="append",
                   help="ode | first_order | pde:u=U | pde_convergence:u=U | p_transform:p=P | lorentz:u=U,w=W")
    p.add_argument("--spec", type=json.loads, help="JSON spec block to check against instead of the entry's own")
    p.add_argument("--grid", type=_grid_arg, help="lo,hi,points")

    p = add("integrate", "integrate the profile ODE from a point on a catalog entry")
    solution_args(p)
    p.add_argument("--span", type=_pair, required=True, help="start,end (start is the initial point)")
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--points", type=int, default=None)

    p = add("simulate", "evolve a catalog entry under the full PDE")
    solution_args(p)
    p.add_argument("--u", type=float, default=0.0, help="wave speed, |u| < 1")
    p.add_argument("--h", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--x-range", type=_pair, help="x_min,x_max")
    p.add_argument("--stride", type=int, help="snapshot every N steps")
    p.add_argument("--boundary", default=None, help="periodic | ends | LEFT,RIGHT")

    p = add("run", "run scenario files")
    p.add_argument("paths", nargs="*", help="scenario JSON files")
    p.add_argument("--all", nargs="?", const="", default=None, metavar="DIR",
                   help="run every *.json in DIR (default: the bundled suite)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--expect", action="store_true",
                   help="exit 0 iff every scenario exits with its expect_exit code")
    return parser


def _options(args) -> RunOptions:
    out = args.out_dir or os.environ.get(OUT_DIR_ENV) or "out"
    return RunOptions(Path(out), args.tol, args.paper_constants, args.svg, args.timing)


def _inline_scenario(args) -> dict:
    cmd = args.command
    sc = {"schema": 1, "action": cmd}
    if cmd == "map":
        sc["name"] = f"map_{args.dist}"
        sc["distribution"] = {"dist": args.dist, **dict(args.param)}
    elif getattr(args, "variant", None):
        sc["name"] = f"{cmd}_{args.variant}"
        sc["solution"] = {"variant": args.variant, **dict(args.param)}
    else:
        sc["name"] = cmd
    if getattr(args, "grid", None):
        sc["grid"] = args.grid
    if cmd == "verify":
        if args.check:
            sc["checks"] = args.check
        if args.spec is not None:
            sc["spec"] = args.spec
    elif cmd == "integrate":
        block = {"eta0": args.span[0], "span": args.span}
        solver = {}
        if args.abs_tol is not None:
            solver["abs_tol"] = args.abs_tol
        if args.rel_tol is not None:
            solver["rel_tol"] = args.rel_tol
        if solver:
            block["solver"] = solver
        if args.points is not None:
            block["points"] = args.points
        sc["integrate"] = block
    elif cmd == "simulate":
        sc["frame"] = {"u": args.u}
        simc = {}
        for key, val in (("h", args.h), ("T", args.T), ("cfl", args.cfl), ("snapshot_stride", args.stride)):
            if val is not None:
                simc[key] = val
        if args.x_range:
            simc["x_min"], simc["x_max"] = args.x_range
        if args.boundary:
            if args.boundary in ("periodic", "ends"):
                simc["boundary"] = args.boundary
            else:
                simc["boundary"] = {"dirichlet": _pair(args.boundary)}
        sc["sim"] = simc
    return sc


def _print_report(report, code, args, out_dir: Path):
    if args.json:
        sys.stdout.write(dumps(report.to_dict()))
        return
    status = "PASS" if code == 0 else "FAIL"
    print(f"{status} {report.scenario} -> {out_dir / report.scenario}")
    for chk in report.checks:
        mark = "ok " if chk["pass"] else "BAD"
        value = chk["max_rel"] if chk["max_rel"] is not None else chk["max_abs"]
        detail = chk["detail"] or {}
        extra = detail.get("message", "")
        if detail.get("slope") is not None:
            extra = f"slope {detail['slope']:.4f} in {detail['slope_range']}"
        print(f"  [{mark}] {chk['name']}: {value!r} (tol {chk['tolerance']!r}) {extra}".rstrip())


def _peek_expect(path: Path) -> Optional[int]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        val = data.get("expect_exit")
        return val if isinstance(val, int) else None
    except (OSError, ValueError, AttributeError):
        return None


def _run_one(path: str, opts: RunOptions):
    report, code, message = run_scenario(path, opts)
    return {
        "file": Path(path).name,
        "scenario": report.scenario if report is not None else Path(path).stem,
        "exit": code,
        "expect_exit": _peek_expect(Path(path)),
        "pass": bool(report is not None and report.passed),
        "message": message,
    }


def _cmd_run(args, opts: RunOptions) -> int:
    paths: List[Path] = [Path(p) for p in args.paths]
    if args.all is not None:
        root = Path(args.all) if args.all else bundled_scenarios()
        if not root.is_dir():
            print(f"error: {root} is not a directory", file=sys.stderr)
            return 2
        paths.extend(sorted(root.glob("*.json")))
    if not paths:
        print("error: no scenario files given (use PATH... or --all)", file=sys.stderr)
        return 2
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    if args.jobs == 1:
        rows = [_run_one(str(p), opts) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_run_one, [str(p) for p in paths], [opts] * len(paths)))
    rows.sort(key=lambda r: (r["scenario"], r["file"]))
    for r in rows:
        if r["exit"] == 2:
            print(f"ERROR {r['scenario']}: {r['message']}", file=sys.stderr)
        else:
            print(r["message"])
    summary = {"scenarios": rows, "pass": all(r["exit"] == 0 for r in rows)}
    if args.expect:
        for r in rows:
            r["matches_expectation"] = r["expect_exit"] is not None and r["exit"] == r["expect_exit"]
        summary["expectations_met"] = all(r["matches_expectation"] for r in rows)
    emit_json(summary, opts.out_dir / "summary.json")
    if args.expect:
        return 0 if summary["expectations_met"] else 1
    return max(r["exit"] for r in rows)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return int(exc.code or 0)
    opts = _options(args)
    if args.command == "run":
        return _cmd_run(args, opts)
    try:
        sc = parse_scenario(_inline_scenario(args))
        report, code = execute(sc, opts)
    except (ScenarioError, DomainError, SolistatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_report(report, code, args, opts.out_dir)
    return code


if __name__ == "__main__":
    sys.exit(main())
