#!/usr/bin/env python3
"""
rotsurf.py

Command line for the rotational-surface toolkit.

  python3 rotsurf.py catalog
  python3 rotsurf.py reconstruct --surface catenoid:a=1 --span 2 --out cat.csv
  python3 rotsurf.py wdiagram --surface elasticoid:a=1,k=0.5 --n 200
  python3 rotsurf.py solve cubic:mu=1 --c 0 --json
  python3 rotsurf.py prescribe --H const:0 --c 1 --reconstruct --out cat.csv
  python3 rotsurf.py mesh --surface pseudosphere:a=1 --ns 200 --ntheta 128 --out ps.obj
  python3 rotsurf.py verify --surface torus:a=2,R=1

Exit codes: 0 ok, 1 bad parameters / empty domain / file problems,
2 numerical failure (non-convergence, or a verify check that did not pass).
CSV goes to --out or standard output; --json prints a report instead of the
human summary.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from curvature import curvatures, discrete_curvature, wdiagram, write_records_csv
from errors import AxisTouch, NumericalError, ParameterError
from generatrix import GeneratrixCurve, reconstruct, resample, restrict, write_curve_csv
from momentum import KINDS, MomentumFn, catalog_named
from numerics import DEFAULT_TOL, Tolerance, fd_derivative
from prescribe import (
    PolyFn,
    classify_cmc,
    darboux_family,
    from_gauss_curvature,
    from_mean_curvature,
    parse_prescribed,
)
from surface import export_obj, mesh_principal_curvatures, revolve, write_mesh_curvature_csv
from weingarten import CylinderMarker, Generic, classify_relation, parse_relation, solve_relation

log = logging.getLogger("rotsurf")

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 1, 2


# ------------------------- helpers -------------------------

def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


def _emit_json(report: Dict) -> None:
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))


def _tol(args) -> Tolerance:
    if args.tol is None:
        return DEFAULT_TOL
    return Tolerance(args.tol, args.tol, DEFAULT_TOL.max_steps)


def default_start(m: MomentumFn) -> float:
    """A turning end when there is one off the axis, else the middle of the domain window."""
    lo, hi = m.domain.lo, m.domain.hi
    if lo > 0.0 and m.is_turning_end(lo):
        return lo
    if math.isfinite(hi) and m.is_turning_end(hi):
        return hi
    wlo, whi = m.domain.window()
    return 0.5 * (wlo + whi)


def default_span(m: MomentumFn) -> float:
    wlo, whi = m.domain.window()
    return 2.0 * (whi - wlo)


def _curve(m: MomentumFn, args, tol: Tolerance) -> GeneratrixCurve:
    x0 = args.x0 if args.x0 is not None else default_start(m)
    span = args.span if args.span is not None else default_span(m)
    return reconstruct(m, x0, args.z0, args.branch, span, tol, args.n)


def off_axis(c: GeneratrixCurve, margin: float = 0.0) -> GeneratrixCurve:
    """
    The run of samples with x > 0 (an axis exit ends the curve on x = 0),
    shortened by `margin` of its length at both ends; sample count kept.
    """
    good = np.nonzero(c.x > 0.0)[0]
    if len(good) < 2:
        raise AxisTouch("curve lies on the axis")
    lo, hi = float(c.s[good[0]]), float(c.s[good[-1]])
    trim = margin * (hi - lo)
    lo, hi = lo + trim, hi - trim
    if (lo, hi) == tuple(c.span):
        return c
    return restrict(c, lo, hi, len(c))


def _write_status(args, path: Optional[str]) -> None:
    if path and not args.json:
        print(f"[✓] Wrote: {path}")


def _csv_target(args):
    """--out, else stdout unless stdout carries the JSON report."""
    if args.out:
        return args.out
    return None if args.json else sys.stdout


def _base_report(m: MomentumFn) -> Dict:
    d = m.describe()
    return {"label": d["label"], "params": d["params"], "domain": d["domain"]}


# ------------------------- commands -------------------------

def cmd_catalog(args) -> int:
    rows = [{"name": name, "kind": kind, "params": list(req), "example": ex}
            for kind, (name, req, ex) in KINDS.items()]
    if args.json:
        _emit_json({"catalog": rows})
        return EXIT_OK
    for r in rows:
        ex = ",".join(f"{k}={v:g}" for k, v in r["example"].items())
        spec = f"{r['name']}:{ex}" if ex else r["name"]
        print(f"{r['name']:<15} {r['kind']:<21} params: {', '.join(r['params']) or '-':<10} e.g. {spec}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    tol = _tol(args)
    m = catalog_named(args.surface, negate=args.flip)
    c = _curve(m, args, tol)
    if c.exit_reason:
        print(f"[!] {c.exit_reason}", file=sys.stderr)
    target = _csv_target(args)
    if target is not None:
        write_curve_csv(c, target)
    if args.json:
        rep = _base_report(m)
        rep.update(
            turning_points=list(c.turning_points),
            exit_reason=c.exit_reason,
            s_range=[float(c.s[0]), float(c.s[-1])],
            samples=len(c),
        )
        _emit_json(rep)
    _write_status(args, args.out)
    return EXIT_OK


def cmd_wdiagram(args) -> int:
    m = catalog_named(args.surface, negate=args.flip)
    recs = wdiagram(m, args.n)
    target = _csv_target(args)
    if target is not None:
        write_records_csv(recs, target)
    if args.json:
        rep = _base_report(m)
        rep["records"] = len(recs)
        _emit_json(rep)
    _write_status(args, args.out)
    return EXIT_OK


def _residual_report(rel, m: MomentumFn) -> Dict[str, float]:
    if isinstance(rel, Generic):
        return {}
    recs = wdiagram(m, 100)
    worst = max((abs(rel.residual(r)) for r in recs), default=0.0)
    return {"max_abs": worst, "samples": len(recs)}


def cmd_solve(args) -> int:
    tol = _tol(args)
    rel = parse_relation(args.relation)
    sign = -1 if args.flip else 1
    m = solve_relation(rel, args.c, sign, tol)
    klass = classify_relation(rel, args.c)
    if isinstance(m, CylinderMarker):
        if args.json:
            _emit_json({"label": m.label, "params": {"radius": m.radius}, "domain": None, "classification": klass})
        else:
            print(f"{m.label}: x = {m.radius:g} (not a graph over x)")
        return EXIT_OK
    residuals = _residual_report(rel, m)
    if args.reconstruct:
        target = _csv_target(args)
        if target is not None:
            write_curve_csv(_curve(m, args, tol), target)
    elif args.out:
        write_records_csv(wdiagram(m, args.n), args.out)
    if args.json:
        rep = _base_report(m)
        rep.update(classification=klass, residuals=residuals)
        _emit_json(rep)
    elif not args.reconstruct or args.out:
        print(f"{m.label}")
        print(f"  class:    {klass.get('class')}")
        print(f"  domain:   ({m.domain.lo:.17g}, {m.domain.hi:.17g})")
        if residuals:
            print(f"  residual: {residuals['max_abs']:.3g} over {residuals['samples']} samples")
    _write_status(args, args.out)
    return EXIT_OK


def _const_value(fn: PolyFn) -> Optional[float]:
    return fn.coeffs[0] if len(fn.coeffs) == 1 else None


def cmd_prescribe(args) -> int:
    tol = _tol(args)
    if (args.H is None) == (args.KG is None):
        raise ParameterError("prescribe: give exactly one of --H or --KG")
    if args.H is not None:
        fn = parse_prescribed(args.H)
        build = from_mean_curvature(fn, args.c, args.base_x, tol)
        h0 = _const_value(fn)
        klass = {"class": classify_cmc(h0, args.c)} if h0 is not None and args.base_x == 0 else None
    else:
        fn = parse_prescribed(args.KG)
        build = from_gauss_curvature(fn, args.c, args.base_x, -1 if args.flip else 1, tol)
        k0 = _const_value(fn)
        klass = None
        if k0 is not None and args.base_x == 0:
            if k0 == 0:
                klass = {"class": "plane" if args.c == 0 else "cone"}
            else:
                family, k, a = darboux_family(k0, args.c)
                klass = {"class": family, "k": k, "a": a}
    m = build.momentum
    target = _csv_target(args)
    if target is not None and args.reconstruct:
        write_curve_csv(_curve(m, args, tol), target)
    elif target is not None:
        write_records_csv(wdiagram(m, args.n), target)
    if args.json:
        rep = _base_report(m)
        rep.update(source=build.source, constant=build.constant, base_x=build.base_x)
        if klass:
            rep["classification"] = klass
        _emit_json(rep)
    _write_status(args, args.out)
    return EXIT_OK


def cmd_mesh(args) -> int:
    tol = _tol(args)
    if not args.out:
        raise ParameterError("mesh: --out PATH is required")
    m = catalog_named(args.surface, negate=args.flip)
    c = off_axis(_curve(m, argparse.Namespace(**{**vars(args), "n": args.ns}), tol))
    mesh = revolve(c, args.ntheta, args.workers)
    export_obj(mesh, args.out, triangulate=args.triangulate)
    _write_status(args, args.out)
    if args.curvature_csv:
        write_mesh_curvature_csv(mesh, mesh_principal_curvatures(mesh, args.workers), args.curvature_csv)
        _write_status(args, args.curvature_csv)
    if args.json:
        rep = _base_report(m)
        rep.update(grid=list(mesh.shape), triangulate=args.triangulate, exit_reason=c.exit_reason)
        _emit_json(rep)
    return EXIT_OK


# ------------------------- verify -------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.value) and self.value <= self.limit


# |K'| above this is too close to a singular end for finite-difference oracles
STEEP = 100.0


def verify_momentum(m: MomentumFn, tol: Tolerance = DEFAULT_TOL, workers: int = 1) -> List[CheckResult]:
    out: List[CheckResult] = []

    recs = wdiagram(m, 100)
    ident = max((max(abs(2.0 * r.H - (r.k_m + r.k_p)), abs(r.K_G - r.k_m * r.k_p)) /
                 max(1.0, abs(r.k_m) + abs(r.k_p)) ** 2 for r in recs), default=0.0)
    out.append(CheckResult("identities", ident, 1e-15))

    worst = 0.0
    for r in recs:
        if abs(r.k_m) > STEEP:
            continue
        fd = fd_derivative(m.value, r.x)
        worst = max(worst, abs(fd - r.k_m) / max(1.0, abs(r.k_m)))
    out.append(CheckResult("deriv_vs_fd", worst, 1e-6))

    # the longer of the two branches from the default start
    curves = [_curve(m, argparse.Namespace(x0=None, z0=0.0, branch=b, span=None, n=4001), tol) for b in (1, -1)]
    c = off_axis(max(curves, key=lambda cv: cv.length))
    with np.errstate(all="ignore"):
        k_at = np.asarray(m.eval(c.x), dtype=float) * np.ones_like(c.x)
        steep = np.abs(np.asarray(m.deriv(c.x), dtype=float) * np.ones_like(c.x)) > STEEP
    drift = np.abs(np.sin(c.theta) - k_at)[~steep & np.isfinite(k_at)]
    out.append(CheckResult("first_integral", float(drift.max()) if drift.size else 0.0, 1e-7))

    # the last few steps before a cusp or axis end are too coarse for the stencil
    dense = resample(off_axis(c, margin=0.02), 10001)
    dk = discrete_curvature(dense)
    with np.errstate(all="ignore"):
        exact = np.asarray(m.deriv(dk[:, 0]), dtype=float) * np.ones(len(dk))
    ok = np.isfinite(exact) & (np.abs(exact) <= STEEP)
    err = np.abs(dk[ok, 1] - exact[ok]) / np.maximum(1.0, np.abs(exact[ok]))
    out.append(CheckResult("discrete_curvature", float(err.max()) if err.size else 0.0, 1e-4))

    mc = off_axis(resample(c, 200), margin=0.1)
    mesh = revolve(mc, 64, workers)
    est = mesh_principal_curvatures(mesh, workers)
    worst = 0.0
    for i in range(1, len(mc) - 1):
        x = float(mc.x[i])
        if not m.domain.contains(x):
            continue
        rec = curvatures(m, x)
        if max(abs(rec.k_m), abs(rec.k_p)) > 10.0:
            continue
        e_m = np.max(np.abs(est.k_m[i] - rec.k_m)) / max(1.0, abs(rec.k_m))
        e_p = np.max(np.abs(est.k_p[i] - rec.k_p)) / max(1.0, abs(rec.k_p))
        worst = max(worst, float(e_m), float(e_p))
    out.append(CheckResult("mesh_curvature", worst, 1e-2))
    return out


def cmd_verify(args) -> int:
    m = catalog_named(args.surface, negate=args.flip)
    results = verify_momentum(m, _tol(args), args.workers)
    passed = all(r.passed for r in results)
    if args.json:
        rep = _base_report(m)
        rep["checks"] = {r.name: {"value": r.value, "limit": r.limit, "passed": r.passed} for r in results}
        rep["passed"] = passed
        _emit_json(rep)
    else:
        print(m.label)
        for r in results:
            print(f"  {'PASS' if r.passed else 'FAIL'}  {r.name:<20} {r.value:.3e}  (limit {r.limit:.0e})")
    return EXIT_OK if passed else EXIT_NUMERIC


# ------------------------- argv -------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (CSV goes to stdout when omitted)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument("--tol", type=float, default=None, help="absolute and relative tolerance (default 1e-10)")
    common.add_argument("--flip", action="store_true", help="take the negative branch of +- solutions")
    common.add_argument("--workers", type=int, default=1, help="mesh rows in parallel (default 1)")

    curve = argparse.ArgumentParser(add_help=False)
    curve.add_argument("--x0", type=float, default=None, help="start distance to the axis (default: turning end or domain middle)")
    curve.add_argument("--z0", type=float, default=0.0)
    curve.add_argument("--branch", type=int, choices=(1, -1), default=1, help="sign of cos(theta0); at a turning start, s direction")
    curve.add_argument("--span", type=float, default=None, help="arc length (default: twice the domain window)")
    curve.add_argument("--n", type=int, default=1025, help="samples (default 1025)")

    ap = argparse.ArgumentParser(prog="rotsurf", description="Rotational surfaces from the geometric linear momentum K(x).")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common], help="list catalog surfaces")

    p = sub.add_parser("reconstruct", parents=[common, curve], help="generatrix samples s,x,z,theta")
    p.add_argument("--surface", required=True, help="catalog entry, e.g. sphere:R=2")

    p = sub.add_parser("wdiagram", parents=[common], help="curvature records x,k_m,k_p,H,K_G")
    p.add_argument("--surface", required=True)
    p.add_argument("--n", type=int, default=200)

    p = sub.add_parser("solve", parents=[common, curve], help="Weingarten relation -> momentum + classification")
    p.add_argument("relation", help="linear:p=..,q=.. | special:a=..,b=..,c=.. | cubic:mu=.. | hyperbola:mu=.. | const:meridian=..")
    p.add_argument("--c", type=float, default=0.0, help="integration constant (a_coef > 0 for hyperbola; 0 = sphere branch)")
    p.add_argument("--reconstruct", action="store_true", help="write the generatrix instead of the W-diagram")

    p = sub.add_parser("prescribe", parents=[common, curve], help="prescribed H(x) or K_G(x) -> momentum")
    p.add_argument("--H", help="mean curvature, const:<v> or poly:<c0>,<c1>,...")
    p.add_argument("--KG", help="Gauss curvature, const:<v> or poly:<c0>,<c1>,...")
    p.add_argument("--c", type=float, default=0.0, help="integration constant")
    p.add_argument("--base-x", type=float, default=0.0, help="lower limit of the integral (default 0)")
    p.add_argument("--reconstruct", action="store_true", help="write the generatrix instead of the W-diagram")

    p = sub.add_parser("mesh", parents=[common, curve], help="revolve into a Wavefront OBJ")
    p.add_argument("--surface", required=True)
    p.add_argument("--ns", type=int, default=200, help="rows along the meridian (default 200)")
    p.add_argument("--ntheta", type=int, default=128, help="vertices per parallel (default 128)")
    p.add_argument("--triangulate", action="store_true")
    p.add_argument("--curvature-csv", default=None, help="also write per-vertex curvature estimates")

    p = sub.add_parser("verify", parents=[common], help="run the oracle checks on a catalog surface")
    p.add_argument("--surface", required=True)
    return ap


COMMANDS = {
    "catalog": cmd_catalog,
    "reconstruct": cmd_reconstruct,
    "wdiagram": cmd_wdiagram,
    "solve": cmd_solve,
    "prescribe": cmd_prescribe,
    "mesh": cmd_mesh,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ParameterError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    raise SystemExit(main())
