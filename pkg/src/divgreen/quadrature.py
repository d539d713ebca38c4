"""Deterministic adaptive quadrature and scale-limit extrapolation.

Region integrals use a quadtree over the bounding box: cells are classified
inside / outside / boundary by a corner-plus-center membership stencil,
inside cells are integrated with tensor Gauss rules refined adaptively,
boundary cells are subdivided and finally closed with an interface-cut
coverage model, and declared singular points force dyadic refinement with
divergence detection on the accumulated shell sums.

Everything here is subdivision-based and free of randomness, so repeated
runs produce bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ScaleSchedule",
    "LimitResult",
    "QuadResult",
    "integrate_region",
    "integrate_curve",
    "limit_extrapolate",
    "DEFAULT_SCHEDULE",
]


# ---------------------------------------------------------------------------
# scale schedules and limit extrapolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleSchedule:
    """Geometric sequence of scales used for delta->0 / k->infinity limits."""

    initial: float = 0.5
    ratio: float = 0.5
    steps: int = 24
    tolerance: float = 1e-6
    cap: float = 1e9

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError("schedule ratio must lie strictly in (0, 1)")
        if self.steps < 3:
            raise ValueError("schedule needs at least 3 steps")
        if self.initial <= 0 or self.tolerance <= 0:
            raise ValueError("schedule initial scale and tolerance must be positive")

    def scales(self):
        return [self.initial * self.ratio**j for j in range(self.steps)]


DEFAULT_SCHEDULE = ScaleSchedule()


@dataclass
class LimitResult:
    """Outcome of a scale-limit extrapolation with its partial-value trace."""

    value: float
    error_bound: float
    status: str  # converged | diverging | no-limit | budget-exhausted
    trace: list = field(default_factory=list)

    @property
    def converged(self):
        return self.status == "converged"


def _split_eval(out):
    """Accept plain values or (value, error) pairs from scale evaluators."""
    if isinstance(out, tuple) and len(out) == 2:
        v, e = out
        return np.asarray(v, dtype=float), float(e)
    return np.asarray(out, dtype=float), 0.0


def _norm(v):
    return float(np.max(np.abs(v))) if np.ndim(v) else abs(float(v))


def _divergence_slope(values, diffs, tol):
    """Monotone growth with non-decaying increments over the last window."""
    if len(diffs) < 5 or diffs[-1] <= tol:
        return False
    window = diffs[-5:]
    if any(d <= 0 for d in window[:-1]):
        return False
    ratios = [window[i + 1] / window[i] for i in range(len(window) - 1)]
    if min(ratios) < 0.98:
        return False
    w = [_signed(v) for v in values[-6:]]
    increasing = all(b > a for a, b in zip(w[:-1], w[1:]))
    decreasing = all(b < a for a, b in zip(w[:-1], w[1:]))
    return increasing or decreasing


def _signed(v):
    if np.ndim(v) == 0:
        return float(v)
    flat = np.ravel(v)
    return float(flat[int(np.argmax(np.abs(flat)))])


def _monotone(values, window):
    w = [_signed(v) for v in values[-window:]]
    if len(w) < window:
        return False
    return all(b > a for a, b in zip(w[:-1], w[1:])) or all(
        b < a for a, b in zip(w[:-1], w[1:])
    )


def _oscillating(values, diffs, tol):
    if len(values) < 6:
        return False
    w = min(10, len(values) - 1)
    window = [_signed(v) for v in values[-(w + 1):]]
    signs = [np.sign(b - a) for a, b in zip(window[:-1], window[1:])]
    flips = sum(1 for a, b in zip(signs[:-1], signs[1:]) if a != 0 and b != 0 and a != b)
    return flips >= 3 and max(diffs[-w:]) > tol


def limit_extrapolate(seq, schedule=DEFAULT_SCHEDULE, accelerate=None):
    """Extrapolate ``seq(scale)`` along a decreasing scale schedule.

    ``seq`` may return a number, a vector, or a ``(value, error)`` pair
    whose error widens the convergence test (so noisy evaluations do not
    stall below their own accuracy).

    Declares ``converged`` when two consecutive differences drop below the
    tolerance, ``diverging`` on monotone growth with non-decaying
    increments (or past the cap), ``no-limit`` on persistent oscillation,
    and ``budget-exhausted`` otherwise.

    ``accelerate='richardson'`` applies first-order Richardson
    extrapolation (errors linear in the scale, as for shell limits of
    curved boundaries) to the convergence test and the returned value;
    ``'richardson2'`` eliminates the linear and quadratic error terms.
    Divergence and oscillation detection always act on the raw sequence.
    """
    values, errors, trace = [], [], []
    first_order = []
    tested = []  # sequence the convergence test runs on
    diffs = []
    rho = schedule.ratio
    for scale in schedule.scales():
        v, e = _split_eval(seq(scale))
        values.append(v)
        errors.append(e)
        trace.append((scale, v.tolist() if v.ndim else float(v)))
        if _norm(v) > schedule.cap:
            return LimitResult(_to_value(v), math.inf, "diverging", trace)
        if accelerate in ("richardson", "richardson2") and len(values) >= 2:
            first_order.append((values[-1] - rho * values[-2]) / (1.0 - rho))
            if accelerate == "richardson":
                tested.append(first_order[-1])
            elif len(first_order) >= 2:
                rho2 = rho * rho
                tested.append(
                    (first_order[-1] - rho2 * first_order[-2]) / (1.0 - rho2)
                )
        elif accelerate is None:
            tested.append(v)
        if len(tested) >= 2:
            diffs.append(_norm(tested[-1] - tested[-2]))
        if len(diffs) >= 2:
            tol_a = schedule.tolerance + errors[-1] + errors[-2]
            tol_b = schedule.tolerance + errors[-2] + errors[-3]
            if diffs[-1] <= tol_a and diffs[-2] <= tol_b:
                return LimitResult(
                    _to_value(tested[-1]), diffs[-1] + errors[-1], "converged", trace
                )
    # a growth pattern is only conclusive if it persists to the budget end:
    # sequences may saturate after a long geometric ramp
    raw_diffs = [_norm(values[i] - values[i - 1]) for i in range(1, len(values))]
    if _divergence_slope(values, raw_diffs, schedule.tolerance + errors[-1]):
        return LimitResult(_to_value(values[-1]), math.inf, "diverging", trace)
    if _oscillating(values, raw_diffs, schedule.tolerance + errors[-1]):
        status = "no-limit"
    else:
        status = "budget-exhausted"
    final = tested[-1] if tested else values[-1]
    err = (diffs[-1] if diffs else math.inf) + errors[-1]
    return LimitResult(_to_value(final), err, status, trace)


def _to_value(v):
    return float(v) if v.ndim == 0 else np.asarray(v)


# ---------------------------------------------------------------------------
# region quadrature
# ---------------------------------------------------------------------------


@dataclass
class QuadResult:
    value: float
    error: float
    status: str  # converged | diverging | budget-exhausted
    levels: int = 0
    cells: int = 0
    trace: list = field(default_factory=list)

    @property
    def converged(self):
        return self.status == "converged"


_G3_NODES = np.array([-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0)])
_G3_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
_G3_XY = np.stack(np.meshgrid(_G3_NODES, _G3_NODES), axis=-1).reshape(-1, 2)
_G3_W = np.outer(_G3_WEIGHTS, _G3_WEIGHTS).reshape(-1) / 4.0  # unit square weights


def _as_field(f):
    if f is None or f == 1:
        return lambda pts: np.ones(len(pts))
    return f


def _eval_field(f, pts):
    out = np.asarray(f(pts), dtype=float)
    if out.ndim == 0:
        out = np.full(len(pts), float(out))
    return out


def _finite(vals):
    return np.where(np.isfinite(vals), vals, 0.0)


def _gauss_cells(f, centers, half):
    """3x3 tensor Gauss on a batch of square cells; returns per-cell integrals.

    ``half`` may be a scalar or a per-cell array of half-widths.
    """
    n = len(centers)
    h = np.broadcast_to(np.asarray(half, dtype=float), (n,))
    pts = centers[:, None, :] + h[:, None, None] * _G3_XY[None, :, :]
    vals = _finite(_eval_field(f, pts.reshape(-1, 2)))
    area = (2.0 * h) ** 2
    if vals.ndim > 1:
        comps = vals.reshape(n, len(_G3_W), -1)
        return np.einsum("nkm,k->nm", comps, _G3_W) * area[:, None]
    comps = vals.reshape(n, len(_G3_W))
    return comps @ _G3_W * area


def _children(centers, half):
    h = 0.5 * half
    offs = np.array([[-1, -1], [1, -1], [-1, 1], [1, 1]])
    if np.ndim(h) == 0:
        return (centers[:, None, :] + h * offs[None, :, :]).reshape(-1, 2), h
    kid = centers[:, None, :] + h[:, None, None] * offs[None, :, :]
    return kid.reshape(-1, 2), np.repeat(h, 4)


def _halfplane_square_fraction(a, b, tau):
    """Area fraction of the unit square (side 1, centered) below a line.

    The line is ``a*u + b*v = tau`` with ``a, b >= 0``; returns the area of
    ``{a*u + b*v <= tau}`` within ``[-1/2, 1/2]^2``.
    """
    a = np.abs(a)
    b = np.abs(b)
    tau = np.clip(tau, -4.0, 4.0)  # fraction saturates past |tau| = (a+b)/2 <= 1
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    hi = np.maximum(hi, 1e-300)
    m = 0.5 * (a + b)
    d = 0.5 * (hi - lo)
    frac = np.where(
        tau <= -m,
        0.0,
        np.where(
            tau >= m,
            1.0,
            np.where(
                np.abs(tau) <= d,
                0.5 + tau / hi,
                np.where(
                    tau > 0,
                    1.0 - (m - tau) ** 2 / np.maximum(2.0 * lo * hi, 1e-300),
                    (m + tau) ** 2 / np.maximum(2.0 * lo * hi, 1e-300),
                ),
            ),
        ),
    )
    return np.clip(frac, 0.0, 1.0)


def _riemann_cells(f, region, centers, half, vec_dim, k=8):
    """Masked midpoint-grid estimate of the integral of f over cell & region.

    Used only for cells adjacent to declared singular points, where the
    value merely tracks the trend of the remaining mass.
    """
    n = len(centers)
    t = ((np.arange(k) + 0.5) / k - 0.5) * 2.0 * half
    sub = np.stack(np.meshgrid(t, t), axis=-1).reshape(-1, 2)
    pts = (centers[:, None, :] + sub[None, :, :]).reshape(-1, 2)
    ins = np.asarray(region.contains(pts), dtype=float)
    vals = _eval_field(f, pts)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    w = (2.0 * half) ** 2 / (k * k)
    if vec_dim:
        masked = vals * ins[:, None]
        return masked.reshape(n, k * k, -1).sum(axis=1) * w
    return (vals * ins).reshape(n, k * k).sum(axis=1) * w


def _coverage(region, centers, half):
    """Inside fraction of boundary cells and a representative inside point.

    Models the interface inside the cell as the line cut given by the
    signed distance and its gradient; the representative point shifts from
    the cell center toward the centroid of the kept part so that the
    product ``f(point) * fraction * area`` is first-order accurate in f
    (exact for axis-aligned cuts).  Falls back to membership subsampling
    when no exact signed distance is available.
    """
    n = len(centers)
    if getattr(region, "sdf_exact", False):
        s0 = np.asarray(region.signed_distance(centers), dtype=float)
        h = half
        ex = np.array([h, 0.0])
        ey = np.array([0.0, h])
        gx = np.asarray(region.signed_distance(centers + ex)) - np.asarray(
            region.signed_distance(centers - ex)
        )
        gy = np.asarray(region.signed_distance(centers + ey)) - np.asarray(
            region.signed_distance(centers - ey)
        )
        gx /= 2.0 * h
        gy /= 2.0 * h
        norm = np.hypot(gx, gy)
        norm = np.maximum(norm, 1e-12)
        nx = gx / norm
        ny = gy / norm
        frac = _halfplane_square_fraction(nx, ny, -s0 / (norm * 2.0 * h))
        # centroid offset along -n for a straight cut keeping fraction `frac`
        shift = -h * (1.0 - frac)
        pts = centers + np.stack([nx * shift, ny * shift], axis=-1)
        return frac, pts
    k = 6
    t = (np.arange(k) + 0.5) / k - 0.5
    sub = np.stack(np.meshgrid(t, t), axis=-1).reshape(-1, 2) * (2.0 * half)
    pts = (centers[:, None, :] + sub[None, :, :]).reshape(-1, 2)
    ins = np.asarray(region.contains(pts), dtype=float).reshape(n, -1)
    return ins.mean(axis=1), centers


def integrate_region(
    f,
    region,
    tol=1e-8,
    singular_points=(),
    max_level=42,
    min_level=5,
    feature_size=None,
    cap=1e12,
    max_cells=600_000,
):
    """Adaptive quadtree integral of ``f`` over a region.

    ``f`` maps an (N, 2) point array to (N,) scalar or (N, m) vector
    values and must be finite away from the declared singular points.
    ``tol`` is an absolute tolerance.  Returns a :class:`QuadResult`;
    the status degrades to ``diverging`` when refinement toward a
    singular point keeps growing the estimate.

    Boundary-cell families are frozen individually once one extra level of
    refinement moves their contribution by less than their share of the
    tolerance, so deep refinement happens only where it pays (near the
    interface curvature and near declared singular points).
    """
    f = _as_field(f)
    if getattr(region, "is_empty", False):
        return QuadResult(0.0, 0.0, "converged")
    bb = region.bounding_box
    if bb is None:
        raise ValueError("integrate_region requires a bounded region")
    lo, hi = bb
    if np.any(hi - lo <= 0):
        return QuadResult(0.0, 0.0, "converged")
    side = float(np.max(hi - lo))
    center = 0.5 * (lo + hi)
    if feature_size is not None and feature_size > 0:
        # regions thinner than the cells fool both the membership stencil
        # and the interface-cut model; resolve down to the feature first
        needed = int(math.ceil(math.log2(max(side / feature_size, 1.0)))) + 1
        min_level = max(min_level, min(needed, max_level - 4, 18))
    sing = np.asarray(singular_points, dtype=float).reshape(-1, 2)

    centers = center[None, :].copy()
    half = 0.5 * side
    parent_est = None  # per-active-cell share of the parent estimate
    smooth_err = 0.0
    frozen_err = 0.0
    probe = _eval_field(f, center[None, :] + 0.1234567 * half)
    vec_dim = probe.shape[1] if probe.ndim > 1 else 0
    total = np.zeros(vec_dim) if vec_dim else 0.0

    level_estimates = []
    guard_sums = []
    n_cells = 0
    freeze_pool = 0.5 * tol
    prev_diff = np.array([math.inf])
    status = "budget-exhausted"

    def vsum(values, mask=None):
        v = values if mask is None else values[mask]
        return v.sum(axis=0) if vec_dim else float(v.sum())

    for level in range(max_level + 1):
        if len(centers) == 0:
            status = "converged"
            break
        n_cells += len(centers)
        diag = half * math.sqrt(2.0)
        cell_area = (2.0 * half) ** 2

        # --- classification ------------------------------------------------
        if getattr(region, "sdf_exact", False):
            s = np.asarray(region.signed_distance(centers), dtype=float)
            inside = s <= -diag
            outside = s >= diag
        else:
            offs = np.array([[0, 0], [-1, -1], [1, -1], [-1, 1], [1, 1]]) * half
            stencil = (centers[:, None, :] + offs[None, :, :]).reshape(-1, 2)
            ins = np.asarray(region.contains(stencil)).reshape(len(centers), 5)
            n_in = ins.sum(axis=1)
            inside = n_in == 5
            outside = n_in == 0
        boundary = ~(inside | outside)

        guard = np.zeros(len(centers), dtype=bool)
        if len(sing):
            d2 = np.min(
                np.sum((centers[:, None, :] - sing[None, :, :]) ** 2, axis=-1), axis=1
            )
            guard = d2 <= (2.0 * diag) ** 2
        guard &= ~outside

        # --- per-cell contributions -----------------------------------------
        contrib = np.zeros((len(centers), vec_dim)) if vec_dim else np.zeros(len(centers))
        cerr = np.zeros(len(centers))

        fin_in = inside & ~guard
        if fin_in.any():
            vals, err = _integrate_smooth(
                f, centers[fin_in], half, tol * 0.25, side, vec_dim
            )
            contrib[fin_in] = vals
            smooth_err += err

        bnd = boundary & ~guard
        if bnd.any():
            cov, rep = _coverage(region, centers[bnd], half)
            fv = _eval_field(f, rep)
            fv = np.where(np.isfinite(fv), fv, 0.0)
            contrib[bnd] = (fv * cov[:, None] if vec_dim else fv * cov) * cell_area

        guard_sum = 0.0
        if guard.any():
            contrib[guard] = _riemann_cells(f, region, centers[guard], half, vec_dim)
            guard_sum = _norm(vsum(contrib, guard))
        guard_sums.append(guard_sum)

        est = total + vsum(contrib, ~outside)
        level_estimates.append(np.asarray(est) if vec_dim else float(est))

        # --- stopping logic --------------------------------------------------
        if _norm(est) > cap:
            status = "diverging"
            break
        diffs = [
            _norm(np.asarray(level_estimates[i]) - np.asarray(level_estimates[i - 1]))
            for i in range(1, len(level_estimates))
        ]
        if (
            level >= min_level
            and len(diffs) >= 2
            and diffs[-1] <= 0.5 * tol
            and diffs[-2] <= 0.5 * tol
        ):
            status = "converged"
            break
        # divergence: refinement toward a singular point stops shrinking its
        # neighborhood's mass while the total keeps growing monotonically
        if level >= 10 and len(guard_sums) >= 6:
            window = guard_sums[-5:]
            if all(w > tol for w in window):
                ratios = [window[i + 1] / window[i] for i in range(4)]
                if min(ratios) >= 0.9 and _monotone(level_estimates, 6):
                    status = "diverging"
                    break

        # --- freeze families whose refinement stopped paying ------------------
        # cheapest-first spending of a shared error pool, so flat stretches
        # of the interface finalize early and refinement concentrates on
        # curvature, corners, and singular neighborhoods
        active = bnd | guard
        fam_diff = None
        fam = None
        if parent_est is not None and bnd.any() and level >= min_level:
            fam = np.arange(len(centers)) // 4
            fam_children = np.zeros((parent_est.shape[0],) + contrib.shape[1:])
            np.add.at(fam_children, fam, contrib)
            fam_guard = np.zeros(parent_est.shape[0], dtype=bool)
            np.logical_or.at(fam_guard, fam, guard)
            fam_diff = (
                np.max(np.abs(fam_children - parent_est), axis=1)
                if vec_dim
                else np.abs(fam_children - parent_est)
            )
            # one-level differences can cancel across symmetric refinements;
            # demand two consecutive contracted refinements before freezing
            fam_prev = np.zeros(parent_est.shape[0])
            np.maximum.at(fam_prev, fam, prev_diff)
            cost = np.maximum(fam_diff, 0.25 * fam_prev)
            cands = np.flatnonzero(~fam_guard)
            if len(cands):
                order = np.argsort(cost[cands], kind="stable")
                cum = np.cumsum(cost[cands][order])
                kmax = int(np.searchsorted(cum, 0.5 * freeze_pool, side="right"))
                fam_freeze = np.zeros(parent_est.shape[0], dtype=bool)
                fam_freeze[cands[order[:kmax]]] = True
                freeze = fam_freeze[fam] & bnd
                if freeze.any():
                    spent = float(cum[kmax - 1]) if kmax else 0.0
                    total = total + vsum(contrib, freeze)
                    frozen_err += spent
                    freeze_pool = max(freeze_pool - spent, 0.02 * tol)
                    active &= ~freeze

        if not active.any():
            status = "converged"
            break
        if n_cells > max_cells or level == max_level:
            break
        total = total + vsum(contrib, fin_in)
        keep_idx = np.flatnonzero(active)
        centers, half = _children(centers[keep_idx], half)
        parent_est = contrib[keep_idx]
        if fam_diff is not None:
            prev_diff = np.repeat(fam_diff[fam[keep_idx]], 4)
        else:
            prev_diff = np.repeat(
                np.full(len(keep_idx), math.inf), 4
            )

    value = level_estimates[-1] if level_estimates else (np.zeros(vec_dim) if vec_dim else 0.0)
    tail = 0.0
    if len(level_estimates) >= 2:
        tail = _norm(np.asarray(level_estimates[-1]) - np.asarray(level_estimates[-2]))
    err = 2.0 * tail + smooth_err + frozen_err
    if status == "diverging":
        err = math.inf
    return QuadResult(
        value if vec_dim else float(value),
        err,
        status,
        levels=len(level_estimates),
        cells=n_cells,
        trace=[v.tolist() if np.ndim(v) else v for v in level_estimates],
    )


def _integrate_smooth(f, centers, half, tol, side, vec_dim, max_waves=18):
    """Adaptive tensor-Gauss integration over fully-inside square cells.

    Refinement is driven by a shared error pool: each wave accepts the
    cells whose coarse/fine Gauss difference fits into an equal share of
    the remaining budget and subdivides only the offenders, so work
    concentrates where the integrand does.  Returns per-root-cell
    integrals plus the accumulated error estimate.
    """
    n = len(centers)
    out = np.zeros((n, vec_dim)) if vec_dim else np.zeros(n)
    err = 0.0
    budget = tol
    cs = centers
    hs = np.full(n, half, dtype=float)
    roots = np.arange(n)
    for wave in range(max_waves):
        if len(cs) == 0:
            break
        coarse = _gauss_cells(f, cs, hs)
        kid_pts, kid_h = _children(cs, hs)
        fine4 = _gauss_cells(f, kid_pts, kid_h)
        fine = (
            fine4.reshape(len(cs), 4, -1).sum(axis=1)
            if vec_dim
            else fine4.reshape(len(cs), 4).sum(axis=1)
        )
        diff = (
            np.max(np.abs(coarse - fine), axis=1) if vec_dim else np.abs(coarse - fine)
        )
        total_diff = float(diff.sum())
        # cells comparable to the region scale may hide narrow features from
        # the Gauss stencil; force refinement below side/8 first
        coarse_cells = bool(np.any(hs > side / 8.0))
        if (total_diff <= budget and not coarse_cells) or wave == max_waves - 1 or len(
            cs
        ) > 250_000:
            np.add.at(out, roots, fine)
            err += total_diff
            break
        ok = (diff <= 0.5 * budget / len(cs)) & (hs <= side / 8.0)
        np.add.at(out, roots[ok], fine[ok])
        err += float(diff[ok].sum())
        budget = max(budget - float(diff[ok].sum()), 0.25 * tol)
        bad = ~ok
        m = len(cs)
        cs = kid_pts.reshape(m, 4, 2)[bad].reshape(-1, 2)
        hs = kid_h.reshape(m, 4)[bad].reshape(-1)
        roots = np.repeat(roots[bad], 4)
    return out, err


# ---------------------------------------------------------------------------
# curve quadrature
# ---------------------------------------------------------------------------


def _curve_eval(f):
    """Adapt evaluators taking (points) or (points, normals)."""

    state = {"mode": None}

    def call(pts, normals):
        if state["mode"] == 1:
            return np.asarray(f(pts), dtype=float)
        if state["mode"] == 2:
            return np.asarray(f(pts, normals), dtype=float)
        try:
            out = np.asarray(f(pts, normals), dtype=float)
            state["mode"] = 2
            return out
        except TypeError:
            state["mode"] = 1
            return np.asarray(f(pts), dtype=float)

    return call


def _simpson_piece(call, piece, s0, s1, tol, depth=0, max_depth=44):
    sm = 0.5 * (s0 + s1)
    ss = np.array([s0, 0.5 * (s0 + sm), sm, 0.5 * (sm + s1), s1])
    pts = piece.point_at(ss)
    nrm = piece.normal_at(ss)
    v = call(pts, nrm)
    h = s1 - s0
    if v.ndim == 1:
        coarse = h / 6.0 * (v[0] + 4.0 * v[2] + v[4])
        fine = h / 12.0 * (v[0] + 4.0 * v[1] + 2.0 * v[2] + 4.0 * v[3] + v[4])
    else:
        coarse = h / 6.0 * (v[0] + 4.0 * v[2] + v[4])
        fine = h / 12.0 * (v[0] + 4.0 * v[1] + 2.0 * v[2] + 4.0 * v[3] + v[4])
    diff = _norm(fine - coarse)
    if not np.all(np.isfinite(fine)):
        raise _SingularHit(s0, s1)
    if diff <= tol or depth >= max_depth:
        return fine, diff / 15.0
    lv, le = _simpson_piece(call, piece, s0, sm, 0.5 * tol, depth + 1, max_depth)
    rv, re = _simpson_piece(call, piece, sm, s1, 0.5 * tol, depth + 1, max_depth)
    return lv + rv, le + re


class _SingularHit(Exception):
    def __init__(self, s0, s1):
        self.interval = (s0, s1)


def integrate_curve(f, curve, tol=1e-10, singular_points=(), cap=1e12):
    """Arc-length adaptive quadrature over boundary pieces.

    ``f`` is called as ``f(points)`` or ``f(points, outward_normals)`` and
    may be vector valued.  Declared singular points that coincide with
    piece endpoints trigger dyadic refinement toward the endpoint with
    divergence detection; non-integrable endpoint singularities yield
    status ``diverging``.
    """
    pieces = _pieces_of(curve)
    call = _curve_eval(f)
    sing = np.asarray(singular_points, dtype=float).reshape(-1, 2)
    total = None
    err = 0.0
    status = "converged"
    for piece in pieces:
        L = piece.length
        if L <= 0:
            continue
        lo_s, hi_s = 0.0, L
        # handle declared singular endpoints by dyadic approach
        for endpoint, is_start in ((piece.start, True), (piece.end, False)):
            if len(sing) and np.min(np.linalg.norm(sing - endpoint, axis=1)) < 1e-9:
                v, e, st = _dyadic_endpoint(call, piece, is_start, tol, cap)
                total = v if total is None else total + v
                err += e
                if st != "converged":
                    status = st
                if is_start:
                    lo_s = 0.5 * L
                else:
                    hi_s = min(hi_s, 0.5 * L)
        if status == "diverging":
            return QuadResult(float("inf"), math.inf, "diverging")
        if hi_s > lo_s:
            v, e = _simpson_piece(call, piece, lo_s, hi_s, max(tol, 1e-15))
            total = v if total is None else total + v
            err += e
    if total is None:
        total = 0.0
    value = float(total) if np.ndim(total) == 0 else np.asarray(total)
    return QuadResult(value, err, status)


def _dyadic_endpoint(call, piece, from_start, tol, cap, max_halvings=60):
    """Integrate toward a singular endpoint over dyadically shrinking spans."""
    L = piece.length
    total = None
    err = 0.0
    contributions = []
    span_hi = 0.5 * L
    for j in range(max_halvings):
        span_lo = span_hi * 0.5
        if from_start:
            s0, s1 = span_lo, span_hi
        else:
            s0, s1 = L - span_hi, L - span_lo
        v, e = _simpson_piece(call, piece, s0, s1, max(tol * 0.5**j, 1e-16))
        total = v if total is None else total + v
        err += e
        contributions.append(_norm(v))
        if _norm(total) > cap:
            return total, math.inf, "diverging"
        if len(contributions) >= 5:
            last = contributions[-5:]
            if all(c > 0 for c in last[:-1]):
                ratios = [last[i + 1] / last[i] for i in range(4)]
                if min(ratios) >= 0.95 and last[-1] > tol:
                    return total, math.inf, "diverging"
        if contributions[-1] <= tol * 0.25:
            # geometric tail estimate
            if len(contributions) >= 2 and contributions[-2] > 0:
                rho = min(contributions[-1] / contributions[-2], 0.9)
                err += contributions[-1] * rho / (1.0 - rho)
            return total, err, "converged"
        span_hi = span_lo
    return total, err + contributions[-1], "budget-exhausted"


def _pieces_of(curve):
    from . import geometry as g

    if isinstance(curve, g.BoundaryCurve):
        return list(curve.pieces)
    if isinstance(curve, (g.Segment, g.Arc)):
        return [curve]
    if isinstance(curve, (list, tuple)):
        out = []
        for c in curve:
            out.extend(_pieces_of(c))
        return out
    raise TypeError(f"cannot integrate over {type(curve).__name__}")
