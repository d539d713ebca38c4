"""Finitely additive measures represented as scale-limit evaluators.

A :class:`LimitMeasure` is not an abstract functional but a recipe: a set
evaluator ``(region, scale) -> value`` whose extrapolated limit along a
scale schedule is the measure of the set.  Densities at a point, smeared
boundary measures, and the normal measures of the Gauss-formula module are
all built this way.  Finite additivity holds for converged evaluations;
countable additivity genuinely fails (and the test suite exhibits the
failure on the shrinking-strip family).

Certificates (aura sequences, core estimates, total-variation lower
bounds) work from finitely many set evaluations and are therefore one-sided
where exact total variation would need a supremum over partitions; each
docstring states the direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as g
from . import quadrature as q
from ._exact import cut, intersection_area, meet, region_area

__all__ = [
    "MEASURE_TOL",
    "CERT_TOL",
    "LimitMeasure",
    "SimpleFunction",
    "AuraCertificate",
    "OuterMeasureResult",
    "ConvergenceReport",
    "DaniellResult",
    "TvBound",
    "CoreEstimate",
    "density_measure",
    "smear_radon",
    "eval_measure",
    "outer_measure",
    "converges_in_measure",
    "daniell_integrate",
    "aura_check",
    "core_estimate",
    "tv_lower_bound",
]

MEASURE_TOL = 1e-6  # measure-evaluation tolerance (schedule convergence)
CERT_TOL = 1e-3  # certificate tolerance (aura, core, round trips)

DEFAULT_MEASURE_SCHEDULE = q.ScaleSchedule(
    initial=0.25, ratio=0.5, steps=24, tolerance=MEASURE_TOL
)


@dataclass
class LimitMeasure:
    """Finitely additive measure given by a scale-indexed set evaluator.

    ``set_evaluator(region, scale)`` returns the scale-``scale`` proxy of
    the measure of ``region`` (optionally with an evaluation error);
    ``eval`` extrapolates it along the schedule.  ``fn_evaluator``, when
    present, integrates a scalar function against the same scale proxy and
    powers the Daniell integral.

    ``dim > 1`` marks a vector measure evaluated componentwise.
    """

    set_evaluator: object
    schedule: q.ScaleSchedule
    ambient: g.Region
    dim: int = 1
    kind: str = ""
    nonnegative: bool = False
    fn_evaluator: object = None
    accelerate: object = None
    scale_cap: object = None  # region -> largest scale that can see it
    support_test: object = None  # region -> False when provably massless

    def eval(self, region) -> q.LimitResult:
        if getattr(region, "is_empty", False):
            return q.LimitResult(0.0 if self.dim == 1 else np.zeros(self.dim), 0.0, "converged", [])
        if self.support_test is not None and not self.support_test(region):
            return q.LimitResult(
                0.0 if self.dim == 1 else np.zeros(self.dim), 0.0, "converged", []
            )
        sched = self.schedule
        if self.scale_cap is not None:
            cap = self.scale_cap(region)
            if cap is not None and cap < sched.initial:
                # scales coarser than the probe set are blind to it and
                # would let the limit converge on leading zeros
                j0 = int(math.ceil(math.log(cap / sched.initial) / math.log(sched.ratio)))
                sched = q.ScaleSchedule(
                    initial=sched.initial * sched.ratio**j0,
                    ratio=sched.ratio,
                    steps=sched.steps,
                    tolerance=sched.tolerance,
                    cap=sched.cap,
                )
        return q.limit_extrapolate(
            lambda d: self.set_evaluator(region, d),
            sched,
            accelerate=self.accelerate,
        )

    def integrate(self, fn, schedule=None) -> q.LimitResult:
        """Extrapolated integral of a scalar function against the measure."""
        if self.fn_evaluator is None:
            raise ValueError(f"measure {self.kind!r} has no function evaluator")
        sched = schedule or self.schedule
        return q.limit_extrapolate(lambda d: self.fn_evaluator(fn, d), sched)


def eval_measure(measure, region):
    """Extrapolated measure of a region, with status and trace."""
    return measure.eval(region)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _ball_meets_ambient(point, ambient, radii=(1e-2, 1e-4)):
    for r in radii:
        a, _ = intersection_area(g.Disk(point, r), ambient)
        if a <= 0:
            return False
    return True


def density_measure(point, ambient, schedule=None):
    """Area-density measure at a point: the limit of ball-intersection ratios.

    ``mu(A) = lim area(A & B(p, d) & ambient) / area(B(p, d) & ambient)``.
    Sets on which the ratio oscillates get a ``no-limit`` status from
    ``eval`` rather than a value.
    """
    p = np.asarray(point, dtype=float)
    schedule = schedule or DEFAULT_MEASURE_SCHEDULE
    if not _ball_meets_ambient(p, ambient):
        raise ValueError("every ball around the base point must meet the ambient set")

    def set_eval(A, delta):
        den, ed = intersection_area(g.Disk(p, delta), ambient)
        num, en = intersection_area(A, g.Disk(p, delta), ambient)
        val = num / den
        return val, (en + abs(val) * ed) / den

    def fn_eval(fn, delta):
        dom = meet(g.Disk(p, delta), ambient)
        den, _ = intersection_area(g.Disk(p, delta), ambient)
        res = q.integrate_region(fn, dom, tol=max(3e-5 * den, 1e-16))
        return res.value / den, res.error / den

    return LimitMeasure(
        set_eval,
        schedule,
        ambient,
        kind=f"density@({p[0]:g},{p[1]:g})",
        nonnegative=True,
        fn_evaluator=fn_eval,
    )


def smear_radon(support, density, ambient, schedule=None):
    """Constructive extension of a boundary Radon measure into the ambient set.

    ``support`` is a boundary curve (or piece list) with a scalar density,
    or a list of ``(point, weight)`` atoms.  The evaluator smears each
    support point by its normalized ball-intersection ratio, so that the
    limit reproduces the curve integral of continuous functions against
    ``density``.  This picks one representative of a non-unique extension;
    the construction is recorded in ``kind``.
    """
    schedule = schedule or DEFAULT_MEASURE_SCHEDULE
    dens = density if callable(density) else (lambda pts, c=float(density): np.full(len(pts), c))

    atoms = None
    pieces = None
    if isinstance(support, (list, tuple)) and support and isinstance(support[0], tuple):
        atoms = [(np.asarray(pt, dtype=float), float(w)) for pt, w in support]
        probe_points = [pt for pt, _ in atoms]
        kind = f"smear-atoms[{len(atoms)}]"
    else:
        pieces = _pieces(support)
        probe_points = [pc.midpoint() for pc in pieces] + [pc.start for pc in pieces]
        kind = f"smear-curve[{len(pieces)} pieces]"
    for pt in probe_points:
        if not _ball_meets_ambient(pt, ambient):
            raise ValueError(
                f"support point ({pt[0]:g},{pt[1]:g}) has a ball with zero-area "
                "ambient intersection"
            )

    def ratio(A, x, delta):
        den, _ = intersection_area(g.Disk(x, delta), ambient)
        if den <= 0:
            return 0.0
        num, _ = intersection_area(A, g.Disk(x, delta), ambient)
        return num / den

    def fn_ratio(fn, x, delta):
        dom = meet(g.Disk(x, delta), ambient)
        den, _ = intersection_area(g.Disk(x, delta), ambient)
        if den <= 0:
            return 0.0, 0.0
        res = q.integrate_region(fn, dom, tol=max(3e-5 * den, 1e-16))
        return res.value / den, res.error / den

    if atoms is not None:

        def set_eval(A, delta):
            vals = np.array([w * float(dens(pt[None, :])[0]) * ratio(A, pt, delta) for pt, w in atoms])
            return float(vals.sum())

        def fn_eval(fn, delta):
            total, err = 0.0, 0.0
            for pt, w in atoms:
                v, e = fn_ratio(fn, pt, delta)
                c = w * float(dens(pt[None, :])[0])
                total += c * v
                err += abs(c) * e
            return total, err

    else:

        def set_eval(A, delta):
            def integrand(pts):
                return np.array(
                    [ratio(A, x, delta) for x in pts]
                ) * np.asarray(dens(pts), dtype=float)

            res = q.integrate_curve(integrand, pieces, tol=1e-8)
            return res.value, res.error

        # smoothed averages vary on the scale of fn, not of delta, so a
        # fixed composite Gauss rule along the support is enough and keeps
        # the per-scale cost bounded
        gauss_pts, gauss_wts = _composite_gauss_nodes(pieces)
        dens_at_nodes = np.asarray(dens(gauss_pts), dtype=float)

        def fn_eval(fn, delta):
            total, err = 0.0, 0.0
            for x, w, dv in zip(gauss_pts, gauss_wts, dens_at_nodes):
                v, e = fn_ratio(fn, x, delta)
                total += w * dv * v
                err += abs(w * dv) * e
            return total, err + 1e-6 * sum(abs(w) for w in gauss_wts)

    return LimitMeasure(
        set_eval, schedule, ambient, kind=kind, nonnegative=False, fn_evaluator=fn_eval
    )


def _pieces(support):
    if isinstance(support, g.BoundaryCurve):
        return list(support.pieces)
    if isinstance(support, (g.Segment, g.Arc)):
        return [support]
    out = []
    for s in support:
        out.extend(_pieces(s))
    return out


_G4 = np.polynomial.legendre.leggauss(4)


def _composite_gauss_nodes(pieces, panels=4):
    """Arc-length Gauss nodes and weights along a list of boundary pieces."""
    pts, wts = [], []
    xg, wg = _G4
    for piece in pieces:
        L = piece.length
        for j in range(panels):
            a = L * j / panels
            b = L * (j + 1) / panels
            s = 0.5 * (a + b) + 0.5 * (b - a) * xg
            w = 0.5 * (b - a) * wg
            pts.extend(piece.point_at(np.asarray(s)))
            wts.extend(w)
    return np.asarray(pts), np.asarray(wts)


# ---------------------------------------------------------------------------
# simple functions
# ---------------------------------------------------------------------------


class SimpleFunction:
    """Finite combination of indicator functions with disjoint regions."""

    def __init__(self, pieces, tol=1e-9):
        self.pieces = [(region, float(coeff)) for region, coeff in pieces]
        for i in range(len(self.pieces)):
            for j in range(i + 1, len(self.pieces)):
                overlap, _ = intersection_area(self.pieces[i][0], self.pieces[j][0])
                if overlap > tol:
                    raise ValueError(
                        f"simple-function regions {i} and {j} overlap (area {overlap:g})"
                    )

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros(len(pts))
        for region, coeff in self.pieces:
            out += coeff * np.asarray(region.contains(pts), dtype=float)
        return out

    def integrate_against(self, measure):
        """Sum of coefficient-weighted measure evaluations; None if any diverges."""
        total, err = 0.0, 0.0
        for region, coeff in self.pieces:
            res = measure.eval(region)
            if not res.converged:
                return None
            total += coeff * res.value
            err += abs(coeff) * res.error_bound
        return total, err


# ---------------------------------------------------------------------------
# outer measure and convergence in measure
# ---------------------------------------------------------------------------


@dataclass
class OuterMeasureResult:
    value: float
    witness: int  # index of the minimizing algebra element, -1 if none
    status: str  # ok | no-superset


def _contains_region(big, small, tol=1e-9):
    a_small, _ = region_area(small)
    inter, _ = intersection_area(big, small)
    return a_small - inter <= tol * max(1.0, a_small)


def validate_algebra(algebra, tol=1e-9):
    """Check that pairwise intersections stay inside the supplied family.

    Accepts nested-or-disjoint families (dyadic cells) and families that
    explicitly contain their pairwise intersections.
    """
    areas = [region_area(S)[0] for S in algebra]
    for i in range(len(algebra)):
        for j in range(i + 1, len(algebra)):
            inter, _ = intersection_area(algebra[i], algebra[j])
            if inter <= tol:
                continue
            if abs(inter - areas[i]) <= tol or abs(inter - areas[j]) <= tol:
                continue  # nested
            represented = any(
                abs(inter - areas[k]) <= tol
                and _contains_region(algebra[i], algebra[k], tol)
                and _contains_region(algebra[j], algebra[k], tol)
                for k in range(len(algebra))
            )
            if not represented:
                raise ValueError(
                    f"algebra is not intersection-closed at elements {i}, {j}"
                )


def outer_measure(measure, A, algebra, validate=True):
    """Infimum of the measure over supplied algebra elements containing A.

    Containment is tested by the area of ``A`` minus the overlap falling
    below tolerance.  Returns an infinite sentinel with status
    ``no-superset`` when nothing in the family contains ``A``.  For vector
    measures the evaluation uses the Euclidean norm (a lower bound of the
    total variation).
    """
    if validate:
        validate_algebra(algebra)
    best = math.inf
    witness = -1
    for idx, S in enumerate(algebra):
        if not _contains_region(S, A):
            continue
        res = measure.eval(S)
        if not res.converged:
            continue
        val = float(np.linalg.norm(res.value)) if measure.dim > 1 else res.value
        if val < best:
            best, witness = val, idx
    if witness < 0:
        return OuterMeasureResult(math.inf, -1, "no-superset")
    return OuterMeasureResult(best, witness, "ok")


@dataclass
class ConvergenceReport:
    masses: list
    verdict: str  # converges | does-not-converge | inconclusive
    eps: float
    flagged_cells: list


def converges_in_measure(f_seq, f, measure, eps, algebra, grid_depth=5, tol=CERT_TOL):
    """Outer-measure test of convergence in measure.

    Approximates each deviation set ``{|f_k - f| > eps}`` by a union of
    grid cells (flagged via a 3x3 sample stencil) and takes its outer
    measure over the supplied algebra.  The verdict is ``converges`` when
    the final outer mass falls below the certificate tolerance.
    """
    lo, hi = measure.ambient.bounding_box
    n = 2**grid_depth
    xs = np.linspace(lo[0], hi[0], n + 1)
    ys = np.linspace(lo[1], hi[1], n + 1)
    offsets = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75], [0.5, 0.5]])

    masses = []
    flagged_counts = []
    for fk in f_seq:
        cells = []
        for i in range(n):
            for j in range(n):
                cell_lo = np.array([xs[i], ys[j]])
                cell_hi = np.array([xs[i + 1], ys[j + 1]])
                sample = cell_lo + offsets * (cell_hi - cell_lo)
                dev = np.abs(np.asarray(fk(sample)) - np.asarray(f(sample)))
                dev = dev[np.isfinite(dev)]
                if len(dev) and np.max(dev) > eps:
                    cells.append(g.Box(cell_lo, cell_hi))
        flagged_counts.append(len(cells))
        if not cells:
            masses.append(0.0)
            continue
        if measure.dim > 1:
            # signed vector evaluations cancel across opposite normals, so
            # certify the deviation mass from below, cell by cell
            masses.append(tv_lower_bound(measure, cells).value)
        else:
            masses.append(_outer_mass_of_cells(measure, cells, algebra))
    if not masses:
        verdict = "inconclusive"
    elif measure.dim > 1:
        # lower bounds certify failure, never convergence
        verdict = "does-not-converge" if masses[-1] > tol else "inconclusive"
    elif masses[-1] <= tol:
        verdict = "converges"
    else:
        verdict = "does-not-converge"
    return ConvergenceReport(masses, verdict, eps, flagged_counts)


def _outer_mass_of_cells(measure, cells, algebra):
    best = math.inf
    for S in algebra:
        if all(_contains_region(S, c) for c in cells):
            res = measure.eval(S)
            if not res.converged:
                continue
            val = float(np.linalg.norm(res.value)) if measure.dim > 1 else abs(res.value)
            best = min(best, val)
    return best


# ---------------------------------------------------------------------------
# Daniell integration
# ---------------------------------------------------------------------------


@dataclass
class DaniellResult:
    value: float
    error: float
    status: str  # converged | not-integrable | budget-exhausted
    determining_sequence: list = field(default_factory=list)


def daniell_integrate(f, measure, levels=6, tol=CERT_TOL):
    """Integral through a determining sequence of range-quantized functions.

    Builds simple functions by quantizing ``f`` into ``2^level`` bins,
    integrates each against the measure through its function evaluator,
    checks that consecutive quantizations are Cauchy in L1, and reports
    the stabilized value.  Declares ``not-integrable`` when the Cauchy
    differences stop decreasing.
    """
    if measure.fn_evaluator is None:
        raise ValueError("daniell_integrate needs a measure with a function evaluator")
    sched = q.ScaleSchedule(
        initial=measure.schedule.initial,
        ratio=measure.schedule.ratio,
        steps=min(measure.schedule.steps, 14),
        tolerance=max(1e-4, measure.schedule.tolerance),
        cap=measure.schedule.cap,
    )
    lo, hi = measure.ambient.bounding_box
    gx = np.linspace(lo[0], hi[0], 41)
    gy = np.linspace(lo[1], hi[1], 41)
    grid = np.stack(np.meshgrid(gx, gy), axis=-1).reshape(-1, 2)
    fv = np.asarray(f(grid), dtype=float)
    fv = fv[np.isfinite(fv)]
    f_lo, f_hi = (float(fv.min()), float(fv.max())) if len(fv) else (0.0, 1.0)
    if f_hi - f_lo < 1e-12:
        f_hi = f_lo + 1.0

    record = []
    values = []
    l1_diffs = []
    prev_q = None
    for level in range(1, levels + 1):
        step = (f_hi - f_lo) / (2**level)

        def quantized(pts, s=step):
            vals = np.asarray(f(pts), dtype=float)
            return f_lo + np.floor((vals - f_lo) / s + 0.5) * s

        res = measure.integrate(quantized, schedule=sched)
        entry = {
            "level": level,
            "bins": 2**level,
            "integral": res.value,
            "status": res.status,
        }
        if prev_q is not None:
            diff_res = measure.integrate(
                lambda pts, a=quantized, b=prev_q: np.abs(a(pts) - b(pts)),
                schedule=sched,
            )
            entry["l1_diff"] = abs(diff_res.value)
            l1_diffs.append(abs(diff_res.value))
        record.append(entry)
        values.append(res.value)
        prev_q = quantized
        if len(l1_diffs) >= 2 and l1_diffs[-1] <= tol and l1_diffs[-2] <= 2 * tol:
            return DaniellResult(values[-1], l1_diffs[-1] + tol, "converged", record)
    if len(l1_diffs) >= 2 and l1_diffs[-1] > l1_diffs[0] and l1_diffs[-1] > 10 * tol:
        return DaniellResult(values[-1], math.inf, "not-integrable", record)
    status = "converged" if (l1_diffs and l1_diffs[-1] <= 10 * tol) else "budget-exhausted"
    err = (l1_diffs[-1] if l1_diffs else math.inf) + tol
    return DaniellResult(values[-1], err, status, record)


# ---------------------------------------------------------------------------
# aura certificates, core, total variation
# ---------------------------------------------------------------------------


@dataclass
class AuraCertificate:
    reference_values: list  # lambda(A_k)
    complement_masses: list  # |mu|(A_k complement)
    masses: list  # mu(A_k)
    verdict: str  # pure-supported | not-certified
    note: str = ""


def aura_check(measure, regions, lambda_ref=None, tol=CERT_TOL):
    """Certificate that a decreasing sequence carries all the measure's mass.

    Requires the reference measure of the sets to decrease toward zero
    while every complement (within the ambient set) has negligible mass.
    Rejects sequences that are not decreasing.
    """
    area_of = lambda A: region_area(A)[0] if lambda_ref is None else lambda_ref(A)
    for A_prev, A_next in zip(regions[:-1], regions[1:]):
        if not _contains_region(A_prev, A_next):
            raise ValueError("aura sequence must be decreasing (nested)")
    lambdas = [area_of(A) for A in regions]
    comp_masses = []
    masses = []
    for A in regions:
        comp = cut(measure.ambient, A)
        res_c = measure.eval(comp)
        comp_val = (
            float(np.linalg.norm(res_c.value)) if measure.dim > 1 else abs(res_c.value)
        )
        comp_masses.append(comp_val if res_c.converged else math.inf)
        res_m = measure.eval(A)
        masses.append(
            res_m.value if res_m.converged else math.nan
        )
    decreasing = all(b <= a + 1e-12 for a, b in zip(lambdas[:-1], lambdas[1:]))
    vanishing = _trend_to_zero(lambdas, tol)
    small_complements = all(c <= tol for c in comp_masses)
    if decreasing and vanishing and small_complements:
        verdict = "pure-supported"
        note = ""
    else:
        verdict = "not-certified"
        reasons = []
        if not decreasing:
            reasons.append("reference values not decreasing")
        if not vanishing:
            reasons.append("reference values do not vanish")
        if not small_complements:
            reasons.append("complement mass above tolerance")
        note = "; ".join(reasons)
    return AuraCertificate(lambdas, comp_masses, masses, verdict, note)


def _trend_to_zero(values, tol):
    if values[-1] <= tol:
        return True
    if len(values) < 3:
        return False
    # Aitken extrapolation of the sequence limit
    a, b, c = values[-3], values[-2], values[-1]
    d1 = b - a
    d2 = c - b
    if abs(d2 - d1) < 1e-300:
        return False
    limit = c - d2 * d2 / (d2 - d1)
    return abs(limit) <= max(tol, 1e-3 * values[0])


@dataclass
class CoreEstimate:
    cells: list
    masses: list
    depth: int

    def covers(self, point, pad=0.0):
        p = np.asarray(point, dtype=float)
        return any(
            bool(np.all(p >= c.lo - pad) and np.all(p <= c.hi + pad)) for c in self.cells
        )


def core_estimate(measure, depth, tol=CERT_TOL, max_depth=8):
    """Grid cells whose slightly inflated neighborhoods carry measure mass.

    The union of the returned cells over-approximates the intersection of
    the measure's core with the ambient closure at the grid resolution.
    """
    if depth > max_depth:
        raise ValueError(f"core_estimate depth {depth} exceeds configured max {max_depth}")
    lo, hi = measure.ambient.bounding_box
    n = 2**depth
    xs = np.linspace(lo[0], hi[0], n + 1)
    ys = np.linspace(lo[1], hi[1], n + 1)
    pad = 0.5 * max((hi[0] - lo[0]) / n, (hi[1] - lo[1]) / n)
    cells, masses = [], []
    for i in range(n):
        for j in range(n):
            cell = g.Box((xs[i], ys[j]), (xs[i + 1], ys[j + 1]))
            inflated = g.Box(cell.lo - pad, cell.hi + pad)
            res = measure.eval(inflated)
            val = (
                float(np.linalg.norm(res.value)) if measure.dim > 1 else abs(res.value)
            )
            if res.converged and val > tol:
                cells.append(cell)
                masses.append(val)
    return CoreEstimate(cells, masses, depth)


@dataclass
class TvBound:
    value: float
    skipped: list
    statuses: list


def tv_lower_bound(measure, partition):
    """Certified lower bound for the total variation over a partition's union.

    Sums Euclidean norms of converged evaluations; non-converged cells are
    skipped and reported (the bound only grows under refinement).
    """
    total = 0.0
    skipped = []
    statuses = []
    for idx, piece in enumerate(partition):
        res = measure.eval(piece)
        statuses.append(res.status)
        if not res.converged:
            skipped.append(idx)
            continue
        total += float(np.linalg.norm(res.value))
    return TvBound(total, skipped, statuses)
