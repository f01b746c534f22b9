"""Command-line entry point: ``posop <subcommand> ...``.

Exit codes: 0 all PASS, 1 any FAIL, 2 any INCONCLUSIVE and no FAIL, 64 usage.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import PosopError
from .poincare import SEVERITY, Status, jacobi_scan, run_massive_suite, run_massless_suite

SCHEMA_VERSION = 1
OUTPUT_ENV = "POSOP_OUTPUT_DIR"
DEFAULT_OUTPUT = "posop-reports"
EXIT_CODES = {Status.PASS: 0, Status.FAIL: 1, Status.INCONCLUSIVE: 2}
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _vector(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    if len(vals) != 3 or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"expected three finite numbers, got {text!r}")
    return vals


def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


@dataclass
class Outcome:
    """One unit of work in a run: a status, a JSON body and optional CSV tables."""

    name: str
    status: Status
    results: dict
    tables: Dict[str, List[dict]] = field(default_factory=dict)
    timings: dict = field(default_factory=dict)


def _worst(statuses) -> Status:
    return max(statuses, key=SEVERITY.__getitem__, default=Status.PASS)


def _guard(name: str, fn: Callable[[], Outcome]) -> Outcome:
    start = time.perf_counter()
    try:
        out = fn()
    except PosopError as exc:
        out = Outcome(name, Status.FAIL, {"error": type(exc).__name__, "message": str(exc)})
    out.timings.setdefault("total_ms", round(1000 * (time.perf_counter() - start), 3))
    return out


def _status(ok: bool) -> Status:
    return Status.PASS if ok else Status.FAIL


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _suite_outcome(report) -> Outcome:
    timings = {c.check_id: round(1000 * c.elapsed, 3) for c in report.checks}
    table = [{"check_id": c.check_id, "status": c.status.value, "residual": c.residual.to_text()}
             for c in report.checks]
    return Outcome(report.suite, report.worst, report.to_dict(with_timing=False), {"checks": table}, timings)


def do_algebra(cfg: dict) -> Outcome:
    suite = cfg["suite"]
    if suite == "massive":
        return _suite_outcome(run_massive_suite(cfg["cutoff"]))
    if suite == "massless":
        return _suite_outcome(run_massless_suite(cfg["cutoff"]))
    parts = [_suite_outcome(jacobi_scan(m)) for m in ("massive", "massless")]
    return Outcome("jacobi", _worst(p.status for p in parts),
                   {p.name: p.results for p in parts},
                   {f"{p.name}": p.tables["checks"] for p in parts},
                   {p.name: p.timings for p in parts})


def do_uncertainty(cfg: dict) -> Outcome:
    from .momentum import GridSpec, anisotropy_ladder, make_gaussian, uncertainty_report

    grid = GridSpec(cfg["kmax"], cfg["grid"], cfg["eps_min"])
    psi = make_gaussian(cfg["alpha"], cfg["k0"], grid)
    rep = uncertainty_report(psi)
    tol = cfg["trace_tol"]
    row = rep.row()
    checks = {
        "trace": abs(rep.trace_check - 0.5) <= tol,
        "symmetric": bool(np.allclose(rep.bound_tensor, rep.bound_tensor.T, atol=0, rtol=0)),
        "robertson": rep.robertson_margin >= -tol,
    }
    results = {"report": row, "robertson_margin": rep.robertson_margin,
               "mean_q": rep.mean_q.tolist(), "mean_p": rep.mean_p.tolist(),
               "grid": grid.describe(), "packet": psi.meta, "checks": checks}
    tables = {"uncertainty": [row]}
    if cfg["ladder"]:
        lad = anisotropy_ladder(cfg["alpha"], cfg["ladder_direction"], cfg["ladder_scales"])
        ltol = cfg["ladder_tol"]
        checks["A_limit"] = abs(lad.A_limit - 1 / 6) <= ltol
        checks["B_kappa2_limit"] = abs(lad.B_kappa2_limit) <= ltol
        results["ladder"] = {"rows": lad.table(), "A_limit": lad.A_limit, "B_kappa2_limit": lad.B_kappa2_limit,
                             "monotone_A": lad.monotone_A, "monotone_B_kappa2": lad.monotone_B_kappa2,
                             "grid": lad.grid}
        tables["anisotropy"] = [dict(r, monotone_A=lad.monotone_A, monotone_B_kappa2=lad.monotone_B_kappa2)
                                for r in lad.table()]
    return Outcome("uncertainty", _status(all(checks.values())), results, tables)


def do_eigen(cfg: dict) -> Outcome:
    from .momentum import SphericalGrid, eigenfunction_residual, radial_eigenfunction_check

    qn = float(np.linalg.norm(cfg["q"]))
    eig = eigenfunction_residual(cfg["q"], cfg["sigma_ladder"], SphericalGrid())
    rad = radial_eigenfunction_check(qn, (0.1, 10.0), cfg["radial_steps"])
    checks = {
        "eigen_order": abs(eig.order - 1.0) <= cfg["order_tol"],
        "radial_max_error": min(rad.residual) <= cfg["radial_tol"],
        "radial_halving_ratio": all(abs(r - 16) <= 4 for r in rad.ratios if np.isfinite(r)),
    }
    results = {"eigenfunction": {"sigma": eig.parameter, "residual": eig.residual, "order": eig.order,
                                 "meta": eig.meta},
               "radial": {"h": rad.parameter, "max_relative_error": rad.residual, "ratios": rad.ratios,
                          "order": rad.order},
               "checks": checks}
    return Outcome("eigen", _status(all(checks.values())), results,
                   {"eigen_ladder": eig.table(), "radial_ladder": rad.table()})


def do_fourier(cfg: dict) -> Outcome:
    from .momentum import position_space_transform

    qn = float(np.linalg.norm(cfg["q"]))
    lo, hi = cfg["x_range"] if cfg["x_range"] else (0.0, 2 * qn)
    xs = np.round(np.arange(lo, hi + cfg["x_step"] / 2, cfg["x_step"]), 12)
    prof = position_space_transform(cfg["q"], cfg["sigma"], xs, damping=cfg["damping"], sign=cfg["sign"])
    checks = {"transverse": prof.transverse_variation <= cfg["transverse_tol"],
              "peak": abs(prof.peak_position - qn) <= cfg["x_step"] * (1 + 1e-9)}
    results = {"peak_position": prof.peak_position, "peak_magnitude": prof.peak_magnitude,
               "transverse_variation": prof.transverse_variation, "fwhm": prof.fwhm,
               "quadrature_nodes": prof.nodes, "meta": prof.meta, "checks": checks}
    return Outcome("fourier", _status(all(checks.values())), results, {"profile": prof.table()})


def do_classical(cfg: dict) -> Outcome:
    from .classical import Velocity, dynamic_translation_experiment

    u = cfg["u"]
    speed = float(np.linalg.norm(u))
    vel = Velocity(u, massless=abs(speed - 1) <= 1e-12)
    res = dynamic_translation_experiment(vel, cfg["t"], cfg["axis"] - 1)
    body = res.to_dict()
    body["massless"] = vel.massless
    ok = res.abs_error <= cfg["tol"]
    body["checks"] = {"closed_form": ok}
    return Outcome("classical", _status(ok), body, {"experiment": [
        {k: body[k] for k in ("t", "epsilon", "bracket_estimate", "closed_form", "abs_error")}
        | {f"u{i + 1}": u[i] for i in range(3)} | {f"dq{i + 1}": body["delta_q"][i] for i in range(3)}]})


def do_jacobi_bracket(cfg: dict) -> Outcome:
    import itertools

    from .classical import coordinate, energy, jacobiator, modified_bracket, momentum, random_points

    pts = random_points(cfg["samples"], cfg["seed"])
    coord = 0.0
    for x in pts:
        for i, j, k in itertools.product(range(1, 4), repeat=3):
            coord = max(coord, abs(jacobiator(coordinate(i), coordinate(j), momentum(k), x)))
    with_h = max(abs(jacobiator(coordinate(i), momentum(j), energy(), x))
                 for x in pts for i in range(1, 4) for j in range(1, 4))
    velocity = max(abs(modified_bracket(coordinate(i), energy(), x) - x.p[i - 1] / np.linalg.norm(x.p))
                   for x in pts for i in range(1, 4))
    checks = {"coordinate_triples": coord <= cfg["tol"], "with_energy": with_h <= cfg["tol"],
              "velocity": velocity <= cfg["velocity_tol"]}
    results = {"max_coordinate_jacobiator": coord, "max_energy_jacobiator": with_h,
               "max_velocity_error": velocity, "checks": checks}
    return Outcome("jacobi-bracket", _status(all(checks.values())), results)


def do_residuals(cfg: dict) -> Outcome:
    from .momentum import GaussianSpec, ccr_residual_study, commutator_residual_study

    spec = GaussianSpec(cfg["alpha"], (0.0, 0.0, 0.0))
    comm = commutator_residual_study(1, 2, spec)
    ccr = ccr_residual_study(1, 2, spec)
    checks = {"commuting_order": abs(comm.order - 2) <= 0.3, "ccr_order": abs(ccr.order - 2) <= 0.3}
    results = {r.name: {"h": r.parameter, "residual": r.residual, "order": r.order, "meta": r.meta}
               for r in (comm, ccr)}
    results["checks"] = checks
    return Outcome("residuals", _status(all(checks.values())), results,
                   {"commutator_ladder": comm.table(), "ccr_ladder": ccr.table()})


DEFAULTS = {
    "uncertainty": {"alpha": 1.0, "k0": (0.0, 0.0, 0.0), "grid": 81, "kmax": 4.0, "eps_min": None,
                    "trace_tol": 1e-6, "ladder": False, "ladder_direction": (0.0, 0.0, 1.0),
                    "ladder_scales": (0.5, 0.25, 0.125), "ladder_tol": 1e-3},
    "eigen": {"q": (0.0, 0.0, 2.0), "sigma_ladder": (0.2, 0.1, 0.05, 0.02),
              "radial_steps": (2500, 5000, 10000, 20000), "order_tol": 0.2, "radial_tol": 1e-8},
    "fourier": {"q": (0.0, 0.0, 2.0), "sigma": 0.05, "damping": 0.5, "sign": 1, "x_step": 0.05,
                "x_range": None, "transverse_tol": 0.05},
    "classical": {"u": (0.6, 0.8, 0.0), "t": 1.0, "axis": 1, "tol": 1e-12},
    "jacobi-bracket": {"samples": 100, "seed": 0, "tol": 1e-6, "velocity_tol": 1e-10},
    "residuals": {"alpha": 1.0},
}

RUNNERS = {"uncertainty": do_uncertainty, "eigen": do_eigen, "fourier": do_fourier,
           "classical": do_classical, "jacobi-bracket": do_jacobi_bracket, "residuals": do_residuals}


def do_all(cfg: dict) -> List[Outcome]:
    outs = []
    for suite in ("massive", "massless", "jacobi"):
        outs.append(_guard(f"algebra-{suite}", lambda s=suite: do_algebra({"suite": s, "cutoff": cfg["cutoff"]})))
    for name, fn in RUNNERS.items():
        sub = dict(DEFAULTS[name])
        if name == "uncertainty":
            sub["ladder"] = True
        outs.append(_guard(name, lambda f=fn, c=sub: f(c)))
    return outs


# ---------------------------------------------------------------------------
# parser and driver
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="posop", description="Position-operator verification suites and studies.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--out", help=f"report directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    p.add_argument("--format", choices=("json", "csv", "both"), default="both")
    p.add_argument("--no-write", action="store_true", help="print the summary only")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    a = sub.add_parser("algebra", help="symbolic verification suites")
    a.add_argument("--suite", choices=("massive", "massless", "jacobi"), required=True)
    a.add_argument("--cutoff", type=int, default=10)

    d = DEFAULTS["uncertainty"]
    u = sub.add_parser("uncertainty", help="uncertainty tensor of a Gaussian packet")
    u.add_argument("--alpha", type=_positive(float), default=d["alpha"])
    u.add_argument("--k0", type=_vector, default=d["k0"])
    u.add_argument("--grid", type=int, default=d["grid"])
    u.add_argument("--kmax", type=_positive(float), default=d["kmax"])
    u.add_argument("--eps-min", type=_positive(float), default=d["eps_min"])
    u.add_argument("--trace-tol", type=_positive(float), default=d["trace_tol"])
    u.add_argument("--ladder", action="store_true", help="also run the small-|k0| anisotropy ladder")

    d = DEFAULTS["eigen"]
    e = sub.add_parser("eigen", help="eigenfunction residuals")
    e.add_argument("--q", type=_vector, default=d["q"])
    e.add_argument("--sigma-ladder", type=_floats, default=d["sigma_ladder"])

    d = DEFAULTS["fourier"]
    f = sub.add_parser("fourier", help="position-space profile of an eigenfunction")
    f.add_argument("--q", type=_vector, default=d["q"])
    f.add_argument("--sigma", type=_positive(float), default=d["sigma"])
    f.add_argument("--damping", type=_positive(float), default=d["damping"])
    f.add_argument("--sign", type=int, choices=(1, -1), default=d["sign"])
    f.add_argument("--x-step", type=_positive(float), default=d["x_step"])
    f.add_argument("--x-range", type=_floats, default=d["x_range"])

    d = DEFAULTS["classical"]
    c = sub.add_parser("classical", help="dynamic translation experiment")
    c.add_argument("--u", type=_vector, default=d["u"])
    c.add_argument("--t", type=_positive(float), default=d["t"])
    c.add_argument("--axis", type=int, choices=(1, 2, 3), default=d["axis"])

    d = DEFAULTS["jacobi-bracket"]
    j = sub.add_parser("jacobi-bracket", help="jacobiator of the modified bracket")
    j.add_argument("--samples", type=_positive(int), default=d["samples"])
    j.add_argument("--seed", type=int, default=d["seed"])

    r = sub.add_parser("residuals", help="grid-refinement residuals of operator identities")
    r.add_argument("--alpha", type=_positive(float), default=DEFAULTS["residuals"]["alpha"])

    al = sub.add_parser("all", help="every suite and study with default settings")
    al.add_argument("--cutoff", type=int, default=10)
    return p


def _config(args, parser: argparse.ArgumentParser) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "format", "no_write", "command")}
    base = dict(DEFAULTS.get(args.command, {}))
    base.update(cfg)
    if args.command == "eigen" and any(s <= 0 for s in base["sigma_ladder"]):
        parser.error("sigma ladder entries must be positive")
    if args.command == "fourier" and base["x_range"] is not None and len(base["x_range"]) != 2:
        parser.error("--x-range takes LO,HI")
    if args.command == "uncertainty" and base["grid"] < 16:
        parser.error("--grid needs at least 16 points per axis")
    return base


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, Status):
        return x.value
    return x


def report_document(command: str, cfg: dict, outcomes: Sequence[Outcome], started: datetime,
                    elapsed: float) -> dict:
    status = _worst(o.status for o in outcomes)
    body = {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__,
            "config": cfg, "status": status.value,
            "results": {o.name: {"status": o.status.value, **o.results} for o in outcomes}}
    header = {"timestamp": started.isoformat(), "elapsed_s": round(elapsed, 3),
              "timings_ms": {o.name: o.timings for o in outcomes}}
    return {"header": _jsonable(header), "body": _jsonable(body)}


def body_bytes(doc: dict) -> bytes:
    """Canonical serialization of the timestamp-free part of a report."""
    return json.dumps(doc["body"], sort_keys=True, indent=2).encode()


def _write(outdir: Path, command: str, doc: dict, outcomes, fmt: str) -> List[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        path = outdir / f"{command}.json"
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        written.append(path)
    if fmt in ("csv", "both"):
        for o in outcomes:
            for tname, rows in o.tables.items():
                if not rows:
                    continue
                stem = command if o.name == command else f"{command}_{o.name}"
                path = outdir / f"{stem}_{tname}.csv"
                with path.open("w", newline="") as fh:
                    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
                    w.writeheader()
                    w.writerows(_jsonable(rows))
                written.append(path)
    return written


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().rstrip() + "\nposop: error: a COMMAND is required")
        cfg = _config(args, parser)
    except UsageError as exc:
        print(str(exc).rstrip(), file=stderr)
        return EXIT_USAGE
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    if args.command == "all":
        outcomes = do_all(cfg)
    elif args.command == "algebra":
        outcomes = [_guard("algebra", lambda: do_algebra(cfg))]
    else:
        outcomes = [_guard(args.command, lambda: RUNNERS[args.command](cfg))]
    doc = report_document(args.command, cfg, outcomes, started, time.perf_counter() - t0)
    for o in outcomes:
        print(f"{o.status.value:<12} {o.name}", file=stdout)
        if "error" in o.results:
            print(f"             {o.results['error']}: {o.results['message']}", file=stdout)
    if not args.no_write:
        outdir = Path(args.out or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)
        for path in _write(outdir, args.command, doc, outcomes, args.format):
            print(f"wrote {path}", file=stdout)
    return EXIT_CODES[_worst(o.status for o in outcomes)]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
