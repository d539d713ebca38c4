"""Command-line front end: fixtures, Gauss checks, densities, traces, suites.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
configuration errors.  Reports are deterministic JSON; sweep tables export
as CSV and plain columnar plot data.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import geometry as g
from .config import CONFIG_ENV_VAR, load_config
from .fields import verify_weak_divergence
from .measures import density_measure
from .normal import gauss_check_bounded, make_approximation
from .reporting import Record, Report, write_columns, write_csv
from .suite import (
    APPROXIMATIONS,
    REGIONS,
    SUITE_NAMES,
    approximation_kind,
    cli_field_names,
    field_by_name,
    region_by_name,
    run_suite,
)
from .traces import pure_part_detector, shell_gradient_limit, silhavy_trace

__all__ = ["main"]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="divgreen",
        description=(
            "Numerical verification of generalized Gauss-Green formulas: "
            "normal measures by two routes, traces of unbounded fields, and "
            "the classic counterexamples."
        ),
    )
    parser.add_argument(
        "--config",
        default=None,
        help=f"config file (JSON or key=value); default from ${CONFIG_ENV_VAR}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="list fields, regions, approximations")
    p.add_argument("--json", action="store_true", help="emit machine-readable JSON")

    p = sub.add_parser("gauss", help="check a Gauss formula for a bounded field")
    p.add_argument("--field", required=True, help="field fixture name")
    p.add_argument("--region", required=True, help="region fixture name or JSON tree")
    p.add_argument("--approx", required=True, help="approximation kind")
    p.add_argument("--center", default=None, help="field center as 'x,y'")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--csv", default=None, help="write the scale trace as CSV")

    p = sub.add_parser("density", help="evaluate the area-density measure at 0")
    p.add_argument(
        "--set",
        dest="setspec",
        required=True,
        help="sector:THETA | strips | halfplane",
    )
    p.add_argument("--out", default=None)

    p = sub.add_parser("trace", help="trace functionals for unbounded fields")
    p.add_argument("--field", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--center", default=None)
    p.add_argument("--detect", action="store_true", help="run the pure-part classifier")
    p.add_argument("--strip-limit", action="store_true", help="strip-ramp limit")
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify-field", help="validate a declared divergence weakly")
    p.add_argument("--field", required=True)
    p.add_argument("--region", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("suite", help="run a verification suite")
    p.add_argument("name", choices=SUITE_NAMES)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--plots", default=None, help="directory for sweep plot data")
    return parser


def _emit(report, out):
    text = report.dumps()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if report.passed else 1


def _parse_center(raw):
    if raw is None:
        return {}
    try:
        x, y = (float(v) for v in raw.split(","))
        return {"center": (x, y)}
    except ValueError as exc:
        raise SystemExit(2) from exc


def _cmd_fixtures(args, config):
    payload = {
        "fields": cli_field_names(),
        "regions": {name: desc for name, desc in sorted(REGIONS.items())},
        "approximations": {name: kind for name, kind in sorted(APPROXIMATIONS.items())},
    }
    if args.json:
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return 0
    print("fields:")
    for name in payload["fields"]:
        print(f"  {name}")
    print("regions:")
    for name, desc in payload["regions"].items():
        print(f"  {name}: {desc}")
    print("approximations:")
    for name, kind in payload["approximations"].items():
        print(f"  {name}: {kind}")
    return 0


def _cmd_gauss(args, config):
    field = field_by_name(args.field, **_parse_center(args.center))
    region = region_by_name(args.region)
    na = make_approximation(region, approximation_kind(args.approx), validate=False)
    rep = gauss_check_bounded(field, region, na, tol=config.gauss_tol)
    report = Report(
        command=f"gauss --field {args.field} --region {args.region} --approx {args.approx}",
        config=config.snapshot(),
    )
    report.add(
        Record(
            "gauss-check",
            anchor="gauss-formula-bounded",
            passed=rep.passed,
            status=rep.rhs_status,
            values=rep.to_record(),
        )
    )
    if args.csv:
        rows = [
            (s, v if isinstance(v, float) else float(np.asarray(v).ravel()[0]))
            for s, v in rep.provenance.get("rhs_trace", [])
        ]
        write_csv(args.csv, ("scale", "value"), rows)
    return _emit(report, args.out)


def _sector_region(theta):
    """Wedge of opening theta anchored at the positive x-axis, in the disk."""
    if theta <= math.pi:
        return g.Intersection(
            g.Intersection(
                g.HalfPlane((0, -1), 0.0),
                g.HalfPlane((-math.sin(theta), math.cos(theta)), 0.0),
            ),
            g.Disk((0, 0), 1.0),
        )
    complement = g.Intersection(
        g.Intersection(
            g.HalfPlane((0, 1), 0.0),
            g.HalfPlane((math.sin(theta), -math.cos(theta)), 0.0),
        ),
        g.Disk((0, 0), 1.1),
    )
    return g.Difference(g.Disk((0, 0), 1.0), complement)


def _cmd_density(args, config):
    ambient = g.Disk((0, 0), 1.0)
    mu = density_measure((0, 0), ambient, schedule=config.schedule())
    report = Report(command=f"density --set {args.setspec}", config=config.snapshot())
    if args.setspec.startswith("sector:"):
        theta = float(args.setspec.split(":", 1)[1])
        if not (0 < theta < 2 * math.pi):
            raise SystemExit(2)
        res = mu.eval(_sector_region(theta))
        expected = theta / (2 * math.pi)
        report.add(
            Record(
                "density-sector",
                anchor="density-at-zero",
                passed=res.converged and abs(res.value - expected) <= 1e-3,
                status=res.status,
                values={"theta": theta, "value": res.value, "expected": expected},
            )
        )
    elif args.setspec == "strips":
        from .suite import check_density

        report.add(check_density()[1])
    elif args.setspec == "halfplane":
        res = mu.eval(g.HalfPlane((0, -1), 0.0))
        report.add(
            Record(
                "density-halfplane",
                anchor="density-at-zero",
                passed=res.converged and abs(res.value - 0.5) <= 1e-3,
                status=res.status,
                values={"value": res.value, "expected": 0.5},
            )
        )
    else:
        raise SystemExit(2)
    return _emit(report, args.out)


def _cmd_trace(args, config):
    field = field_by_name(args.field, **_parse_center(args.center))
    region = region_by_name(args.region)
    report = Report(
        command=f"trace --field {args.field} --region {args.region}",
        config=config.snapshot(),
    )
    if args.detect:
        rep = pure_part_detector(field, region)
        report.add(
            Record(
                "pure-part-detection",
                anchor="radon-representability-criterion",
                passed=rep.classification != "inconclusive",
                status=rep.limit.status,
                values={"classification": rep.classification},
            )
        )
    elif args.strip_limit:
        lim = shell_gradient_limit(field, region, ramp_kind="strip")
        report.add(
            Record(
                "strip-ramp-limit",
                anchor="shell-gradient-limit",
                passed=lim.status in ("converged", "diverging"),
                status=lim.status,
                values={"value": lim.value if lim.status == "converged" else None},
            )
        )
    else:
        one = lambda p: np.ones(len(p))
        zgrad = lambda p: np.zeros((len(p), 2))
        tv = silhavy_trace(field, region, one, zgrad)
        report.add(
            Record(
                "trace-of-unit-scalar",
                anchor="trace-norm-bound",
                passed=tv.within_bound,
                status=tv.status,
                values={"value": tv.value, "bound": tv.field_norm * tv.lipschitz_norm},
            )
        )
    return _emit(report, args.out)


def _cmd_verify_field(args, config):
    field = field_by_name(args.field, **_parse_center(getattr(args, "center", None)))
    region = region_by_name(args.region)
    rep = verify_weak_divergence(field, region, tol=1e-3)
    report = Report(
        command=f"verify-field --field {args.field} --region {args.region}",
        config=config.snapshot(),
    )
    report.add(
        Record(
            "weak-divergence-residuals",
            anchor="weak-divergence-identity",
            passed=rep.passed,
            values={"max_residual": rep.max_residual, "residuals": rep.residuals},
        )
    )
    return _emit(report, args.out)


def _cmd_suite(args, config):
    sweeps = {}
    report = run_suite(args.name, config, sweeps=sweeps)
    if args.plots:
        os.makedirs(args.plots, exist_ok=True)
        for name, rows in sorted(sweeps.items()):
            xs = [r[0] for r in rows]
            ys = [r[1] for r in rows]
            write_columns(os.path.join(args.plots, f"{name}.dat"), (xs, ys))
    for record in report.records:
        marker = "PASS" if record.passed else "FAIL"
        sys.stderr.write(f"{marker} {record.name}\n")
    return _emit(report, args.out)


_COMMANDS = {
    "fixtures": _cmd_fixtures,
    "gauss": _cmd_gauss,
    "density": _cmd_density,
    "trace": _cmd_trace,
    "verify-field": _cmd_verify_field,
    "suite": _cmd_suite,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    try:
        return _COMMANDS[args.command](args, config)
    except (KeyError, g.GeometryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
