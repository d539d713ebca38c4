"""Named fixtures and the verification suites run by the CLI and the tests.

Each check pins one published statement to a numeric criterion at a fixed
tolerance and emits a deterministic record; the acceptance suite is the
full set, the quick suite a sub-minute subset.  Reports carry no clocks or
environment data, so repeated runs are byte-identical.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry as g
from .fields import fixture, fixture_names
from .measures import aura_check, core_estimate, density_measure
from .normal import (
    APPROXIMATION_KINDS,
    gauss_check_bounded,
    make_approximation,
    nonintegrability_witness,
    normal_measure_boundary,
    normal_measure_shell,
    tv_lowerbound_check,
)
from .reporting import Record, Report
from .traces import (
    ball_cover,
    lipschitz_bound,
    pure_part_detector,
    shell_gradient_limit,
    silhavy_trace,
    strip_gradient_series,
)

__all__ = [
    "REGIONS",
    "APPROXIMATIONS",
    "region_by_name",
    "field_by_name",
    "approximation_kind",
    "run_suite",
    "SUITE_NAMES",
]


# ---------------------------------------------------------------------------
# fixture registries
# ---------------------------------------------------------------------------

REGIONS = {
    "box": "unit box [0,1]^2",
    "unit-square": "alias of box",
    "disk": "unit disk at the origin",
    "quarter-disk": "radius-1/2 disk restricted to the first quadrant",
    "tall-rect": "rectangle (0,1) x (-1,1)",
    "tangential-cap": "half-plane x<=y capped by the ball at (1/2,1/2) of radius 1/4",
}

APPROXIMATIONS = {
    "ramp": "distance-ramp",
    "inner": "inner-portmanteau",
    "outer": "outer-portmanteau",
    "canonical": "canonical-mollified",
}

SUITE_NAMES = ("acceptance", "quick")


def region_by_name(name):
    if name in ("box", "unit-square"):
        return g.Box((0, 0), (1, 1))
    if name == "disk":
        return g.Disk((0, 0), 1.0)
    if name == "quarter-disk":
        return g.Intersection(
            g.Intersection(g.Disk((0, 0), 0.5), g.HalfPlane((-1, 0), 0.0)),
            g.HalfPlane((0, -1), 0.0),
        )
    if name == "tall-rect":
        return g.Box((0, -1), (1, 1))
    if name == "tangential-cap":
        return g.Intersection(g.HalfPlane((1, -1), 0.0), g.Disk((0.5, 0.5), 0.25))
    try:
        import json

        return g.region_from_json(json.loads(name))
    except Exception:
        raise KeyError(f"unknown region {name!r}; known: {sorted(REGIONS)}")


def field_by_name(name, **params):
    if name == "point-source-at-edge":
        params.setdefault("center", (0.5, 0.0))
        return fixture("point-source", **params)
    return fixture(name, **params)


def cli_field_names():
    return sorted(fixture_names() + ["point-source-at-edge"])


def approximation_kind(name):
    if name in APPROXIMATIONS:
        return APPROXIMATIONS[name]
    if name in APPROXIMATION_KINDS:
        return name
    raise KeyError(f"unknown approximation {name!r}; known: {sorted(APPROXIMATIONS)}")


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def check_vortex_strip(sweeps=None):
    """Vortex strip pairings dominate the half-log lower bound and diverge."""
    field = field_by_name("vortex")
    omega = region_by_name("unit-square")
    series = strip_gradient_series(field, omega, (10, 100, 1000), rel_tol=1e-6)
    rows = []
    ok = True
    for k, value, err in series:
        bound = 0.5 * math.log(k * k + 1)
        rows.append({"k": k, "value": value, "bound": bound, "error": err})
        ok &= value >= bound
    values = [r["value"] for r in rows]
    increasing = all(b > a for a, b in zip(values[:-1], values[1:]))
    limit = shell_gradient_limit(field, omega, ramp_kind="strip")
    ok = ok and increasing and limit.status == "diverging"
    if sweeps is not None:
        sweeps["vortex_strip"] = [(r["k"], r["value"]) for r in rows]
    return Record(
        "vortex-strip-lower-bound",
        anchor="vortex-strip-lower-bound",
        passed=ok,
        status=limit.status,
        values={"series": rows, "increasing": increasing},
    )


def check_point_source_strip(sweeps=None):
    """Point-source strip pairings approach one half at the closed-form rate."""
    field = field_by_name("point-source")
    omega = region_by_name("tall-rect")
    series = strip_gradient_series(field, omega, (10, 100, 1000), rel_tol=1e-6)
    rows = []
    ok = True
    for k, value, err in series:
        tol_k = 1.0 / (2.0 * math.pi * k) + 1e-4
        rows.append({"k": k, "value": value, "deviation": abs(value - 0.5), "tol": tol_k})
        ok &= abs(value - 0.5) <= tol_k
    limit = shell_gradient_limit(field, omega, ramp_kind="strip")
    ok = ok and limit.status == "converged" and abs(limit.value - 0.5) <= 1e-3
    if sweeps is not None:
        sweeps["point_source_strip"] = [(r["k"], r["value"]) for r in rows]
    return Record(
        "point-source-strip-limit",
        anchor="point-source-strip-limit",
        passed=ok,
        status=limit.status,
        values={"series": rows, "limit": limit.value},
    )


def check_density():
    """Sector densities, the shrinking-strip family, and additivity failure."""
    ambient = g.Disk((0, 0), 1.0)
    mu = density_measure((0, 0), ambient)
    records = []
    wedges = {
        math.pi / 2: g.Intersection(
            g.Intersection(g.HalfPlane((-1, 0), 0.0), g.HalfPlane((0, -1), 0.0)),
            g.Disk((0, 0), 1.0),
        ),
        math.pi: g.Intersection(g.HalfPlane((0, -1), 0.0), g.Disk((0, 0), 1.0)),
        3 * math.pi / 2: g.Difference(
            g.Disk((0, 0), 1.0),
            g.Intersection(
                g.Intersection(g.HalfPlane((-1, 0), 0.0), g.HalfPlane((0, -1), 0.0)),
                g.Disk((0, 0), 1.1),
            ),
        ),
    }
    sector_vals = []
    ok = True
    for theta, wedge in wedges.items():
        res = mu.eval(wedge)
        expected = theta / (2 * math.pi)
        sector_vals.append(
            {"theta": theta, "value": res.value, "expected": expected, "status": res.status}
        )
        ok &= res.converged and abs(res.value - expected) <= 1e-3
    records.append(
        Record(
            "density-sector-ratios",
            anchor="density-at-zero",
            passed=ok,
            values={"sectors": sector_vals},
        )
    )
    strips = [g.Box((1 / (j + 2), -1), (1 / (j + 1), 1)) for j in range(1, 12)]
    strip_vals = [mu.eval(A).value for A in strips]
    union_val = mu.eval(g.Box((1e-12, -1), (0.5, 1))).value
    violates = sum(strip_vals) <= 1e-6 and abs(union_val - 0.5) <= 1e-3
    records.append(
        Record(
            "density-strip-family",
            anchor="density-additivity-failure",
            passed=violates,
            values={
                "strip_masses": strip_vals,
                "union_mass": union_val,
                "sigma_additivity_violated": bool(violates),
            },
        )
    )
    return records


def check_route_agreement():
    """Shell-limit and boundary-integral normal measures agree on a grid."""
    frame = g.Box((-3, -3), (3, 3))
    pairs = []
    for rname in ("box", "disk", "quarter-disk"):
        omega = region_by_name(rname)
        na = make_approximation(omega, "distance-ramp", validate=False)
        shell = normal_measure_shell(omega, na)
        lo, hi = omega.bounding_box
        w = hi - lo
        probes = [
            ("right-band", g.Box((hi[0] - 0.2 * w[0], lo[1] - 0.3), (hi[0] + 0.3, hi[1] + 0.3))),
            ("top-band", g.Box((lo[0] - 0.3, hi[1] - 0.2 * w[1]), (hi[0] + 0.3, hi[1] + 0.3))),
            ("vertical-cut", g.Intersection(frame, g.HalfPlane((-1, 0), -(lo[0] + 0.3 * w[0])))),
            ("horizontal-cut", g.Intersection(frame, g.HalfPlane((0, -1), -(lo[1] + 0.3 * w[1])))),
        ]
        for bname, B in probes:
            rs = shell.eval(B)
            rb = normal_measure_boundary(omega, na.chi, B)
            diff = float(np.max(np.abs(np.asarray(rs.value) - rb)))
            pairs.append(
                {
                    "region": rname,
                    "probe": bname,
                    "shell": np.asarray(rs.value).tolist(),
                    "boundary": rb.tolist(),
                    "diff": diff,
                    "status": rs.status,
                }
            )
    worst = max(p["diff"] for p in pairs)
    ok = worst <= 1e-3 and all(p["status"] == "converged" for p in pairs)
    return Record(
        "normal-measure-route-agreement",
        anchor="route-agreement",
        passed=ok,
        values={"pairs": pairs, "worst_diff": worst},
    )


def check_gauss_residuals(gauss_tol=1e-3):
    """Gauss formulas for smooth fields under all approximation kinds."""
    records = []
    combos = []
    ok = True
    for rname in ("disk", "box"):
        omega = region_by_name(rname)
        for kind in APPROXIMATION_KINDS:
            na = make_approximation(omega, kind, validate=False)
            for fname in ("linear", "polynomial"):
                rep = gauss_check_bounded(field_by_name(fname), omega, na, tol=gauss_tol)
                combos.append(
                    {
                        "field": fname,
                        "region": rname,
                        "kind": kind,
                        "lhs": rep.lhs,
                        "rhs": rep.rhs,
                        "residual": rep.residual,
                        "pass": rep.passed,
                    }
                )
                ok &= rep.passed
    records.append(
        Record(
            "gauss-smooth-fields",
            anchor="gauss-formula-bounded",
            passed=ok,
            values={"combos": combos},
        )
    )
    box = region_by_name("box")
    na = make_approximation(box, "canonical-mollified", validate=False)
    rep = gauss_check_bounded(field_by_name("point-source-at-edge"), box, na, tol=gauss_tol)
    records.append(
        Record(
            "gauss-boundary-atom-half-weight",
            anchor="boundary-half-weight",
            passed=rep.passed
            and abs(rep.lhs - 0.5) <= 1e-3
            and abs(rep.rhs - 0.5) <= 1e-3,
            values=rep.to_record(),
        )
    )
    return records


def check_tv_lower_bound():
    """Shell-measure variation dominates boundary length on windows."""
    box = region_by_name("box")
    na = make_approximation(box, "distance-ramp", validate=False)
    windows = [
        ("all", None),
        ("corner-ball", g.Disk((0, 0), 0.22)),
        ("edge-band", g.Box((-0.1, 0.4), (1.1, 0.6))),
    ]
    rows = []
    ok = True
    for wname, window in windows:
        rep = tv_lowerbound_check(box, na, window, depth=6)
        rows.append(
            {
                "window": wname,
                "tv_bound": rep.tv_bound,
                "perimeter": rep.perimeter_in_window,
                "pass": rep.passed,
            }
        )
        ok &= rep.passed
    return Record(
        "variation-dominates-boundary-length",
        anchor="variation-lower-bound",
        passed=ok,
        values={"windows": rows},
    )


def check_nonintegrability():
    """Tangential and atomic blow-up witnesses."""
    records = []
    tang = nonintegrability_witness(
        field_by_name("diag-tangential"),
        region_by_name("tangential-cap"),
        "tangential",
        {"thresholds": (10.0, 100.0)},
    )
    ok = tang.verdict == "witnessed" and all(
        e["mass_bound"] >= 0.5 - 1e-3 for e in tang.entries
    )
    records.append(
        Record(
            "tangential-blowup-mass",
            anchor="tangential-blowup",
            passed=ok,
            values={"entries": tang.entries},
        )
    )
    qd = region_by_name("quarter-disk")
    na = make_approximation(qd, "canonical-mollified", validate=False)
    atom = nonintegrability_witness(
        field_by_name("point-source"), qd, "atomic", {"clips": (10.0, 100.0, 1000.0)}, na=na
    )
    incs = [
        b["pairing"] - a["pairing"] for a, b in zip(atom.entries[:-1], atom.entries[1:])
    ]
    target = math.log(10.0) / (2 * math.pi)
    ok = atom.verdict == "witnessed" and all(
        abs(i - target) <= 0.05 * target for i in incs
    )
    records.append(
        Record(
            "atomic-blowup-log-growth",
            anchor="atomic-blowup",
            passed=ok,
            values={"entries": atom.entries, "increments": incs, "target": target},
        )
    )
    return records


def check_aura_core():
    """Shrinking balls certify the density measure; its core sits at the origin."""
    ambient = g.Disk((0, 0), 1.0)
    mu = density_measure((0, 0), ambient)
    balls = [g.Disk((0, 0), 1.0)] + [
        g.Intersection(g.Disk((0, 0), 1.0 / k), g.Disk((0, 0), 1.0))
        for k in (2, 4, 8, 16, 32, 64, 128)
    ]
    cert = aura_check(mu, balls)
    ok = (
        cert.verdict == "pure-supported"
        and max(cert.complement_masses) <= 1e-6
        and all(abs(m - 1.0) <= 1e-3 for m in cert.masses)
    )
    ce = core_estimate(mu, 6)
    cell = 2.0 / 2**6
    near_origin = all(
        float(np.linalg.norm(0.5 * (c.lo + c.hi))) <= 3 * cell for c in ce.cells
    )
    ok = ok and bool(ce.cells) and near_origin
    return Record(
        "aura-certificate-and-core",
        anchor="aura-certificate",
        passed=ok,
        values={
            "verdict": cert.verdict,
            "reference_values": cert.reference_values,
            "complement_masses": cert.complement_masses,
            "masses": cert.masses,
            "core_cells": len(ce.cells),
            "core_near_origin": bool(near_origin),
        },
    )


def _boundary_zero_pair(scale=1.0):
    def f(p):
        x, y = p[:, 0], p[:, 1]
        return scale * x * (1 - x) * y * (1 - y)

    def grad(p):
        x, y = p[:, 0], p[:, 1]
        return scale * np.stack(
            [(1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y)], axis=-1
        )

    return f, grad


def check_trace_functional():
    """Trace bound, boundary-zero nullity, and extension independence."""
    records = []
    square = region_by_name("unit-square")
    rect = region_by_name("tall-rect")
    f = lambda p: np.cos(p[:, 0]) + p[:, 1]
    grad = lambda p: np.stack([-np.sin(p[:, 0]), np.ones(len(p))], axis=-1)
    cases = [
        ("constant", square),
        ("linear", square),
        ("polynomial", square),
        ("vortex", square),
        ("point-source", rect),
    ]
    rows = []
    ok = True
    for name, omega in cases:
        tv = silhavy_trace(field_by_name(name), omega, f, grad)
        rows.append(
            {
                "field": name,
                "value": tv.value,
                "bound": tv.field_norm * tv.lipschitz_norm,
                "within": tv.within_bound,
            }
        )
        ok &= tv.within_bound
    records.append(
        Record("trace-bound", anchor="trace-norm-bound", passed=ok, values={"cases": rows})
    )

    rng = np.random.default_rng(20240817)
    base_f, base_g = _boundary_zero_pair()
    worst = 0.0
    for _ in range(20):
        a, b, c = rng.uniform(-2, 2, size=3)

        def fz(p, a=a, b=b, c=c):
            return base_f(p) * (a + b * p[:, 0] + c * p[:, 1])

        def gz(p, a=a, b=b, c=c):
            lin = a + b * p[:, 0] + c * p[:, 1]
            return base_g(p) * lin[:, None] + base_f(p)[:, None] * np.stack(
                [b * np.ones(len(p)), c * np.ones(len(p))], axis=-1
            )

        tv = silhavy_trace(field_by_name("polynomial"), square, fz, gz)
        worst = max(worst, abs(tv.value))
    records.append(
        Record(
            "boundary-zero-trace",
            anchor="boundary-zero-nullity",
            passed=worst <= 1e-3,
            values={"worst": worst, "samples": 20},
        )
    )

    f1 = lambda p: p[:, 0] + 0.5 * p[:, 1]
    g1 = lambda p: np.broadcast_to([1.0, 0.5], (len(p), 2)).copy()
    bz, bzg = _boundary_zero_pair(7.0)
    f2 = lambda p: f1(p) + bz(p)
    g2 = lambda p: g1(p) + bzg(p)
    diffs = {}
    ok = True
    for name in ("vortex", "polynomial"):
        t1 = silhavy_trace(field_by_name(name), square, f1, g1)
        t2 = silhavy_trace(field_by_name(name), square, f2, g2)
        diffs[name] = abs(t1.value - t2.value)
        ok &= diffs[name] <= 1e-3
    records.append(
        Record(
            "trace-extension-independence",
            anchor="extension-independence",
            passed=ok,
            values={"diffs": diffs},
        )
    )
    return records


def check_lipschitz():
    """Cover-constant bound dominates sampled quotients; connectivity enforced."""
    quads = [
        (1, 0, 0),
        (0, 1, 0),
        (0.5, -1, 2),
        (2, 1, 1),
        (0, 0, 1),
        (-1, 2, 0.5),
        (3, 0, -1),
        (1, -1, 1),
        (0.2, 0.3, -0.4),
        (-2, -2, 2),
    ]
    sets = [
        g.reduced_boundary(g.Disk((0, 0), 1.0))[0],
        g.reduced_boundary(g.Disk((0.2, 0.1), 0.8))[0],
    ]
    rows = []
    ok = True
    for i, (a, b, c) in enumerate(quads):

        def f(p, a=a, b=b, c=c):
            return a * p[:, 0] ** 2 + b * p[:, 0] * p[:, 1] + c * p[:, 1]

        def grad(p, a=a, b=b, c=c):
            return np.stack(
                [2 * a * p[:, 0] + b * p[:, 1], b * p[:, 0] + c * np.ones(len(p))],
                axis=-1,
            )

        K = sets[i % len(sets)]
        est = lipschitz_bound(f, K, 0.15, grad=grad, hess_bound=2 * abs(a) + abs(b))
        rows.append(
            {
                "coeffs": (a, b, c),
                "quotient": est.sampled_quotient,
                "bound": est.bound,
                "cover": est.cover_size,
                "accepted": est.accepted,
            }
        )
        ok &= est.accepted
    try:
        ball_cover(
            [g.Segment((-1, -2), (1, -2), (0, -1)), g.Segment((-1, 2), (1, 2), (0, 1))],
            0.5,
        )
        rejected = False
    except ValueError:
        rejected = True
    ok = ok and rejected
    return Record(
        "lipschitz-cover-bound",
        anchor="lipschitz-chaining",
        passed=ok,
        values={"fixtures": rows, "disconnected_rejected": rejected},
    )


def check_classifier():
    """Shell criterion separates the vortex from the point source."""
    vort = pure_part_detector(field_by_name("vortex"), region_by_name("unit-square"))
    ps = pure_part_detector(field_by_name("point-source"), region_by_name("tall-rect"))
    ok = (
        vort.classification == "pure-gradient-part-required"
        and ps.classification == "radon-representable"
    )
    return Record(
        "pure-part-classifier",
        anchor="radon-representability-criterion",
        passed=ok,
        values={"vortex": vort.classification, "point_source": ps.classification},
    )


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def run_suite(name, config=None, sweeps=None):
    """Run a named suite and return its report (and fill sweep data)."""
    from .config import RunConfig

    config = config or RunConfig()
    if name not in SUITE_NAMES:
        raise KeyError(f"unknown suite {name!r}; known: {SUITE_NAMES}")
    report = Report(command=f"suite {name}", config=config.snapshot())
    if name == "quick":
        report.add(check_density()[0])
        box = region_by_name("box")
        na = make_approximation(box, "distance-ramp", validate=False)
        rep = gauss_check_bounded(field_by_name("linear"), box, na, tol=config.gauss_tol)
        report.add(
            Record(
                "gauss-linear-box-ramp",
                anchor="gauss-formula-bounded",
                passed=rep.passed,
                values=rep.to_record(),
            )
        )
        report.add(check_vortex_strip(sweeps))
        return report
    report.add(check_vortex_strip(sweeps))
    report.add(check_point_source_strip(sweeps))
    for rec in check_density():
        report.add(rec)
    report.add(check_route_agreement())
    for rec in check_gauss_residuals(config.gauss_tol):
        report.add(rec)
    report.add(check_tv_lower_bound())
    for rec in check_nonintegrability():
        report.add(rec)
    report.add(check_aura_core())
    for rec in check_trace_functional():
        report.add(rec)
    report.add(check_lipschitz())
    report.add(check_classifier())
    return report
