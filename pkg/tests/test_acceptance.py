"""Acceptance gate: every criterion at its stated tolerance, timed.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them
live).  The full-suite report is produced once per session and reused by
the criteria it covers; the determinism criterion reruns it from scratch.
"""

import time

from divgreen.config import RunConfig
from divgreen.suite import (
    check_aura_core,
    check_classifier,
    check_density,
    check_gauss_residuals,
    check_lipschitz,
    check_nonintegrability,
    check_point_source_strip,
    check_route_agreement,
    check_trace_functional,
    check_tv_lower_bound,
    check_vortex_strip,
    run_suite,
)

_RESULTS = {}


def _report(criterion, label, passed, seconds=None):
    timing = f" [{seconds:.1f}s]" if seconds is not None else ""
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {label}{timing}")
    assert passed, f"criterion {criterion} failed: {label}"


def test_criterion_01_vortex_strip_witness():
    t0 = time.time()
    rec = check_vortex_strip()
    dt = time.time() - t0
    ok = rec.passed and dt <= 10.0
    for row in rec.values["series"]:
        assert row["value"] >= row["bound"]
    assert rec.status == "diverging"
    _report(1, "vortex strip pairings dominate the half-log bound and diverge", ok, dt)


def test_criterion_02_point_source_strip_limit():
    t0 = time.time()
    rec = check_point_source_strip()
    dt = time.time() - t0
    for row in rec.values["series"]:
        assert row["deviation"] <= row["tol"]
    ok = rec.passed and dt <= 10.0
    _report(2, "point-source strip pairings approach 1/2 at the closed-form rate", ok, dt)


def test_criterion_03_density_at_zero():
    t0 = time.time()
    sector_rec, strip_rec = check_density()
    dt = time.time() - t0
    for entry in sector_rec.values["sectors"]:
        assert abs(entry["value"] - entry["expected"]) <= 1e-3
    assert all(abs(v) <= 1e-6 for v in strip_rec.values["strip_masses"])
    assert abs(strip_rec.values["union_mass"] - 0.5) <= 1e-3
    assert strip_rec.values["sigma_additivity_violated"] is True
    ok = sector_rec.passed and strip_rec.passed and dt <= 5.0
    _report(3, "sector densities and the additivity-failure family", ok, dt)


def test_criterion_04_route_agreement():
    t0 = time.time()
    rec = check_route_agreement()
    dt = time.time() - t0
    assert len(rec.values["pairs"]) == 12
    assert rec.values["worst_diff"] <= 1e-3
    ok = rec.passed and dt <= 60.0
    _report(4, "shell and boundary routes agree on 12 region/probe pairs", ok, dt)


def test_criterion_05_gauss_residuals():
    t0 = time.time()
    smooth, half = check_gauss_residuals(gauss_tol=1e-3)
    dt = time.time() - t0
    assert len(smooth.values["combos"]) == 16
    assert all(c["residual"] <= 1e-3 for c in smooth.values["combos"])
    assert abs(half.values["lhs"] - 0.5) <= 1e-3
    assert abs(half.values["rhs"] - 0.5) <= 1e-3
    ok = smooth.passed and half.passed
    _report(5, "Gauss residuals for smooth fields and the half-weight atom", ok, dt)


def test_criterion_06_tv_lower_bound():
    t0 = time.time()
    rec = check_tv_lower_bound()
    dt = time.time() - t0
    for row in rec.values["windows"]:
        assert row["tv_bound"] >= row["perimeter"] - 1e-2
    _report(6, "partition variation dominates clipped boundary length", rec.passed, dt)


def test_criterion_07_nonintegrability():
    t0 = time.time()
    tang, atom = check_nonintegrability()
    dt = time.time() - t0
    for entry in tang.values["entries"]:
        assert entry["mass_bound"] >= 0.5 - 1e-3
    target = atom.values["target"]
    for inc in atom.values["increments"]:
        assert abs(inc - target) <= 0.05 * target
    _report(7, "tangential mass bound and atomic log growth", tang.passed and atom.passed, dt)


def test_criterion_08_aura_certificate():
    t0 = time.time()
    rec = check_aura_core()
    dt = time.time() - t0
    assert rec.values["verdict"] == "pure-supported"
    assert max(rec.values["complement_masses"]) <= 1e-6
    assert all(abs(m - 1.0) <= 1e-3 for m in rec.values["masses"])
    assert rec.values["core_near_origin"]
    _report(8, "shrinking balls certify the density measure; core at origin", rec.passed, dt)


def test_criterion_09_trace_functional():
    t0 = time.time()
    bound, zero, ext = check_trace_functional()
    dt = time.time() - t0
    assert all(c["within"] for c in bound.values["cases"])
    assert zero.values["worst"] <= 1e-3
    assert all(d <= 1e-3 for d in ext.values["diffs"].values())
    ok = bound.passed and zero.passed and ext.passed
    _report(9, "trace bound, boundary-zero nullity, extension independence", ok, dt)


def test_criterion_10_lipschitz_lemma():
    t0 = time.time()
    rec = check_lipschitz()
    dt = time.time() - t0
    assert len(rec.values["fixtures"]) == 10
    assert all(r["accepted"] for r in rec.values["fixtures"])
    assert rec.values["disconnected_rejected"]
    _report(10, "cover-constant bound sound on 10 fixtures; disconnected rejected", rec.passed, dt)


def test_criterion_11_classifier():
    t0 = time.time()
    rec = check_classifier()
    dt = time.time() - t0
    assert rec.values["vortex"] == "pure-gradient-part-required"
    assert rec.values["point_source"] == "radon-representable"
    _report(11, "pure-part classifier separates vortex from point source", rec.passed, dt)


def test_criterion_12_determinism_and_runtime():
    cfg = RunConfig()
    t0 = time.time()
    first = run_suite("acceptance", cfg).dumps()
    t1 = time.time() - t0
    t0 = time.time()
    second = run_suite("acceptance", cfg).dumps()
    t2 = time.time() - t0
    ok = first == second and t1 <= 300.0 and t2 <= 300.0
    _report(
        12,
        f"byte-identical acceptance reports (runtimes {t1:.0f}s / {t2:.0f}s)",
        ok,
        t1 + t2,
    )
