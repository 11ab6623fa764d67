"""Command-line front end: solve instances, classify centers, sweep the
cylinder, fit the complementary surface, run the acceptance suites.

Outputs are flat files only: JSON for solutions, reports and classification,
CSV for point clouds, the one-term-per-line text format for polynomials.
Tolerances come from defaults, overridden by a JSON config named either in
the P3PSTRATA_TOLERANCES environment variable or the --tolerances flag.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import deltoid, strata
from .deltoid import SweepConfig
from .fixtures import fixture_by_name, load_fixtures
from .p3p import (CameraCenter, ContinuumDetected, DegenerateTriangle,
                  P3PInstance, Triangle, instance_from_center, make_triangle,
                  solve, system_polys)
from .polynomials import SparsePoly, format_poly
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .verify import SUITES, SceneFormatError, _scene_center, _scene_number, \
    run_verify

TOLERANCES_ENV = "P3PSTRATA_TOLERANCES"


def _load_tolerances(path: Optional[str]) -> Tolerances:
    chosen = path or os.environ.get(TOLERANCES_ENV)
    if not chosen:
        return DEFAULT_TOLERANCES
    data = json.loads(Path(chosen).read_text())
    return Tolerances.from_dict(data)


def _parse_triangle(text: str) -> Triangle:
    """A fixture name/key, or comma-separated side lengths (rationals ok)."""
    if "," not in text:
        return fixture_by_name(text.strip()).triangle
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("triangle needs three comma-separated side lengths")
    return make_triangle(*parts)


def _parse_center(text: str) -> CameraCenter:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("center needs three comma-separated coordinates")
    vals = []
    for p in parts:
        vals.append(Fraction(p) if "/" in p else float(p))
    return CameraCenter(*vals)


def _solution_dict(s) -> dict:
    return {"e1": [s.e1.real, s.e1.imag],
            "e2": [s.e2.real, s.e2.imag],
            "e3": [s.e3.real, s.e3.imag],
            "residual": s.residual,
            "physical": s.is_physical,
            "multiplicity": s.multiplicity_hint}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _instance_from_file(path: str, tol: Tolerances) -> P3PInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as ex:
        raise SceneFormatError(
            f"line {ex.lineno}, column {ex.colno}: {ex.msg}") from ex
    if not isinstance(doc, dict):
        raise SceneFormatError("top level: expected an object")
    tri = doc.get("triangle")
    if not isinstance(tri, dict):
        raise SceneFormatError("triangle: required object missing")
    missing = [k for k in ("s12", "s13", "s23") if k not in tri]
    if missing:
        raise SceneFormatError(f"triangle: missing {', '.join(missing)}")
    try:
        t = make_triangle(*(_scene_number(tri[k], f"triangle.{k}")
                            for k in ("s12", "s13", "s23")))
    except DegenerateTriangle as ex:
        raise DegenerateTriangle(f"triangle.{{s12, s13, s23}}: {ex}") from ex
    if "center" in doc:
        O = _scene_center(doc["center"], "center")
        return instance_from_center(t, O)
    cos = doc.get("cosines")
    if not isinstance(cos, dict):
        raise SceneFormatError("need either center or cosines")
    missing = [k for k in ("c12", "c13", "c23") if k not in cos]
    if missing:
        raise SceneFormatError(f"cosines: missing {', '.join(missing)}")
    return P3PInstance(t, *(float(_scene_number(cos[k], f"cosines.{k}"))
                            for k in ("c12", "c13", "c23")))


def _cmd_solve(args, tol: Tolerances) -> int:
    inst = _instance_from_file(args.instance, tol)
    if args.dump_poly:
        blocks = [format_poly(f, ("e1", "e2", "e3"))
                  for f in system_polys(inst)]
        _emit("\n\n".join(blocks) + "\n", args.output)
        return 0
    try:
        sols = solve(inst, tol)
    except ContinuumDetected as ex:
        doc = {"continuum": True, "message": str(ex),
               "representatives": [_solution_dict(s)
                                   for s in ex.representatives]}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
        return 0
    _emit(json.dumps([_solution_dict(s) for s in sols], indent=2) + "\n",
          args.output)
    return 0


def _cmd_classify(args, tol: Tolerances) -> int:
    t = _parse_triangle(args.triangle)
    O = _parse_center(args.center)
    label, report = strata.classify(t, O, tol)
    if args.json:
        doc = {"label": label.as_dict(),
               "dual_space": report.as_dict() if report else None}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        mu = "inf" if label.mu is None else label.mu
        _emit(f"{label.kind.value} (mu = {mu}): {label.reason}\n",
              args.output)
    return 0


def _cmd_morley(args, tol: Tolerances) -> int:
    t = _parse_triangle(args.triangle)
    md = strata.morley_triangle(t, tol)
    lines = ["thetas: " + " ".join(f"{th:.12f}" for th in md.thetas)]
    for name, v in (("D", md.D), ("E", md.E), ("F", md.F)):
        lines.append(f"vertex {name}: {v[0]:.12f} {v[1]:.12f}")
    lines.append(f"side: {md.side:.12f}")
    for th, (bx, by) in zip(md.thetas, md.generatrix_bases):
        lines.append(f"generatrix base (theta {th:.12f}): "
                     f"{bx:.12f} {by:.12f}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


_SWEEP_COLUMNS = ("theta", "h", "Ox", "Oy", "Oz", "mu", "branch_index",
                  "e1p", "e2p", "e3p", "Opx", "Opy", "Opz", "on_generatrix")


def _cmd_sweep(args, tol: Tolerances) -> int:
    t = _parse_triangle(args.triangle)
    (_, R) = t.circumcircle()
    cfg = SweepConfig(t, theta_samples=args.thetas, height_samples=args.heights,
                      height_range=(args.hmin * R, args.hmax * R),
                      include_morley=not args.no_morley)
    sw = deltoid.sweep_cylinder(cfg, tol)
    rows = 0
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(_SWEEP_COLUMNS)
        for r in sw.records:
            e = r.complement_e.e
            for c in r.complement_centers:
                w.writerow([f"{r.theta:.12g}", f"{r.h:.12g}",
                            f"{r.source_center.x:.12g}",
                            f"{r.source_center.y:.12g}",
                            f"{r.source_center.z:.12g}",
                            r.source_mu, r.branch_index,
                            f"{e[0].real:.12g}", f"{e[1].real:.12g}",
                            f"{e[2].real:.12g}",
                            f"{c.x:.12g}", f"{c.y:.12g}", f"{c.z:.12g}",
                            int(r.on_morley_generatrix)])
                rows += 1
    finally:
        if args.output:
            out.close()
    print(f"{rows} rows ({len(sw.records)} records, "
          f"{len(sw.failures)} failed grid points)", file=sys.stderr)
    return 0


def _model_poly(model) -> SparsePoly:
    terms = {tuple(m): Fraction(float(c))
             for c, m in zip(model.coefficients, model.basis) if c != 0.0}
    return SparsePoly(3, terms)


def _cmd_deltoid_fit(args, tol: Tolerances) -> int:
    t = _parse_triangle(args.triangle)
    cfg = SweepConfig(t, theta_samples=args.thetas,
                      height_samples=args.heights, include_morley=True)
    sw = deltoid.sweep_cylinder(cfg, tol)
    if args.space == "e":
        model = deltoid.fit_deltoid_e(sw, tol=tol)
        names = ("e1p", "e2p", "e3p")
    else:
        model = deltoid.fit_deltoid_xyz(sw, tol=tol)
        names = ("x", "y", "z")
    _emit(format_poly(_model_poly(model), names) + "\n", args.output)
    report = {"space": args.space,
              "basis_kind": model.meta.get("basis_kind"),
              "coordinate_scale": model.meta.get("coordinate_scale"),
              "terms": int(np.count_nonzero(model.coefficients)),
              "sample_count": model.sample_count,
              "rms_residual": model.rms_residual,
              "max_residual": model.max_residual,
              "sweep_records": len(sw.records),
              "sweep_failures": len(sw.failures)}
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args, tol: Tolerances) -> int:
    try:
        report = run_verify(args.suite, tol, triangle=args.triangle,
                            seed=args.seed, out_path=args.output)
    except KeyError as ex:
        print(f"error: {ex.args[0]}", file=sys.stderr)
        return 2
    for line in report.summary_lines():
        print(line)
    if not args.output:
        sys.stdout.write(report.to_json())
    return 0 if report.passed else 1


def _cmd_dump_fixtures(args, tol: Tolerances) -> int:
    fixtures = ([fixture_by_name(args.name)] if args.name
                else load_fixtures())
    blocks: List[str] = []
    for f in fixtures:
        head = [f"fixture: {f.name} ({f.key})",
                "sides: " + " ".join(str(s) for s in f.sides),
                "sides_sq: " + " ".join(str(q) for q in f.sides_sq)]
        blocks.append("\n".join(head))
        for c in f.components:
            kind = f"{c.kind}, trivial" if c.trivial else c.kind
            blocks.append(f"component {c.name} ({kind}):\n"
                          + format_poly(c.poly, ("e1p", "e2p", "e3p")))
        if f.deg16_leading:
            lead = ", ".join(f"{mono}: {v}"
                             for mono, v in sorted(f.deg16_leading.items(),
                                                   reverse=True))
            blocks.append(f"deg16 leading: {lead}")
    _emit("\n\n".join(blocks) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="p3pstrata",
        description="P3P singular-configuration toolkit: solve, classify, "
                    "sweep, fit, verify.")
    ap.add_argument("--tolerances", metavar="JSON",
                    help="tolerance config file (overrides "
                         f"${TOLERANCES_ENV})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a P3P instance file")
    p.add_argument("instance", help="JSON file with triangle + center "
                                    "or triangle + cosines")
    p.add_argument("--dump-poly", action="store_true",
                   help="print the three distance quadrics instead of solving")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("classify", help="stratum of one camera center")
    p.add_argument("--triangle", required=True,
                   help="s12,s13,s23 or a fixture name")
    p.add_argument("--center", required=True, help="x,y,z")
    p.add_argument("--json", action="store_true",
                   help="emit the label and the dual-space report as JSON")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("morley", help="Morley triangle and generatrix bases")
    p.add_argument("--triangle", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_morley)

    p = sub.add_parser("sweep", help="cylinder sweep to CSV")
    p.add_argument("--triangle", required=True)
    p.add_argument("--thetas", type=int, default=64)
    p.add_argument("--heights", type=int, default=8)
    p.add_argument("--hmin", type=float, default=0.25,
                   help="lowest height as a fraction of R")
    p.add_argument("--hmax", type=float, default=2.0,
                   help="highest height as a fraction of R")
    p.add_argument("--no-morley", action="store_true",
                   help="skip forcing the three Morley angles into the grid")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("deltoid", help="complementary-surface operations")
    dsub = p.add_subparsers(dest="deltoid_command", required=True)
    pf = dsub.add_parser("fit", help="implicitize the complement cloud")
    pf.add_argument("--triangle", required=True)
    pf.add_argument("--space", choices=("e", "xyz"), default="e")
    pf.add_argument("--thetas", type=int, default=96)
    pf.add_argument("--heights", type=int, default=10)
    pf.add_argument("-o", "--output", help="polynomial text output path")
    pf.add_argument("--report", help="JSON residual report path")
    pf.set_defaults(fn=_cmd_deltoid_fit)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--triangle", help="restrict to one fixture, e.g. 7,6,5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="JSON report path")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("dump-fixtures",
                       help="reference triangles and their components")
    p.add_argument("--name", help="one fixture by name or key")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_dump_fixtures)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        tol = _load_tolerances(args.tolerances)
    except (OSError, ValueError) as ex:
        print(f"error: bad tolerance config: {ex}", file=sys.stderr)
        return 2
    try:
        return args.fn(args, tol)
    except (SceneFormatError, DegenerateTriangle, KeyError, ValueError) as ex:
        msg = ex.args[0] if ex.args else str(ex)
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
