"""Catalog of divergence-measure vector fields with declared divergences.

Every field is closed form, with its distributional divergence declared as
data: an absolutely continuous density, point atoms, and curve-concentrated
parts.  Declarations are validated weakly against compactly supported test
functions (with shrinking-tube excision around singular curves), mirroring
how the counterexample fields are handled analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from . import geometry as g
from . import quadrature as q
from ._exact import cut

__all__ = [
    "Bump",
    "DivergenceMeasure",
    "DMField",
    "DivergenceValue",
    "WeakDivergenceReport",
    "fixture",
    "fixture_names",
    "bump_basis",
    "verify_weak_divergence",
    "dm_norm",
    "divergence_of",
]

_CLAMP = 1e12  # magnitude clamp for singular-field norms; the clamped set
# has vanishing contribution for every integrable fixture


@dataclass
class DivergenceMeasure:
    """Declared divergence: a.c. density + point atoms + curve parts."""

    density: object = None  # (N,2)->(N,) or None for zero
    atoms: list = dfield(default_factory=list)  # [(point, weight)]
    curve_parts: list = dfield(default_factory=list)  # [(piece, density fn)]

    def pairing(self, phi, ambient, singular_points=(), tol=1e-8):
        """Integral of a scalar test function against the divergence measure."""
        total, err = 0.0, 0.0
        if self.density is not None:
            res = q.integrate_region(
                lambda p: np.asarray(self.density(p)) * np.asarray(phi(p)),
                ambient,
                tol=tol,
                singular_points=singular_points,
            )
            total += res.value
            err += res.error
        for point, weight in self.atoms:
            pt = np.asarray(point, dtype=float)
            if bool(ambient.contains(pt)):
                total += weight * float(np.asarray(phi(pt[None, :]))[0])
        for piece, cdens in self.curve_parts:
            res = q.integrate_curve(
                lambda p: np.asarray(cdens(p)) * np.asarray(phi(p)), piece, tol=tol
            )
            total += res.value
            err += res.error
        return total, err

    def total_variation(self, ambient, tol=1e-8):
        total = 0.0
        if self.density is not None:
            res = q.integrate_region(
                lambda p: np.abs(np.asarray(self.density(p))), ambient, tol=tol
            )
            total += res.value
        for point, weight in self.atoms:
            if bool(ambient.contains(np.asarray(point, dtype=float))):
                total += abs(weight)
        for piece, cdens in self.curve_parts:
            res = q.integrate_curve(
                lambda p: np.abs(np.asarray(cdens(p))), piece, tol=tol
            )
            total += res.value
        return total


@dataclass
class DMField:
    """Closed-form vector field with a declared divergence measure."""

    name: str
    fn: object  # (N,2) -> (N,2)
    divergence: DivergenceMeasure
    p_class: object  # 1 or math.inf
    singular_points: list = dfield(default_factory=list)
    singular_curves: list = dfield(default_factory=list)  # geometry pieces
    params: dict = dfield(default_factory=dict)

    def __call__(self, pts):
        return self.fn(np.atleast_2d(np.asarray(pts, dtype=float)))

    def magnitude(self, pts, clamp=_CLAMP):
        v = self(pts)
        with np.errstate(invalid="ignore"):
            m = np.linalg.norm(v, axis=-1)
        return np.minimum(np.where(np.isfinite(m), m, clamp), clamp)

    def describe(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({extra})" if extra else self.name


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def _constant(c=(1.0, 0.0)):
    c = np.asarray(c, dtype=float)
    return DMField(
        "constant",
        lambda p: np.broadcast_to(c, p.shape).copy(),
        DivergenceMeasure(),
        math.inf,
        params={"c": tuple(c)},
    )


def _linear(matrix=((1.0, 0.0), (0.0, 1.0))):
    A = np.asarray(matrix, dtype=float)
    tr = float(np.trace(A))
    return DMField(
        "linear",
        lambda p: p @ A.T,
        DivergenceMeasure(density=lambda p, t=tr: np.full(len(p), t)),
        math.inf,
        params={"matrix": tuple(map(tuple, A))},
    )


def _polynomial():
    # F = (x^2, y^2), div = 2x + 2y
    return DMField(
        "polynomial",
        lambda p: p**2,
        DivergenceMeasure(density=lambda p: 2.0 * (p[:, 0] + p[:, 1])),
        math.inf,
        params={},
    )


def _vortex(center=(0.0, 0.0)):
    c = np.asarray(center, dtype=float)

    def fn(p):
        rel = p - c
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = (rel**2).sum(axis=-1, keepdims=True)
            out = np.stack([rel[:, 1], -rel[:, 0]], axis=-1) / r2
        return out

    return DMField(
        "vortex",
        fn,
        DivergenceMeasure(),
        1,
        singular_points=[tuple(c)],
        params={"center": tuple(c)},
    )


def _point_source(center=(0.0, 0.0), weight=1.0):
    c = np.asarray(center, dtype=float)
    w = float(weight)

    def fn(p):
        rel = p - c
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = (rel**2).sum(axis=-1, keepdims=True)
            out = (w / (2.0 * math.pi)) * rel / r2
        return out

    return DMField(
        "point-source",
        fn,
        DivergenceMeasure(atoms=[(tuple(c), w)]),
        1,
        singular_points=[tuple(c)],
        params={"center": tuple(c), "weight": w},
    )


def _diag_tangential(extent=2.0):
    # tangentially singular along the diagonal x = y
    def fn(p):
        d = p[:, 0] - p[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.abs(d) ** -0.5
        return np.stack([mag, mag], axis=-1)

    diag = g.Segment((-extent, -extent), (extent, extent), (-1 / math.sqrt(2), 1 / math.sqrt(2)))
    return DMField(
        "diag-tangential",
        fn,
        DivergenceMeasure(),
        1,
        singular_curves=[diag],
        params={"extent": extent},
    )


_FIXTURES = {
    "constant": _constant,
    "linear": _linear,
    "polynomial": _polynomial,
    "vortex": _vortex,
    "point-source": _point_source,
    "diag-tangential": _diag_tangential,
}


def fixture_names():
    return sorted(_FIXTURES)


def fixture(name, **params):
    """Build a catalog field by name; unknown names raise KeyError."""
    if name not in _FIXTURES:
        raise KeyError(f"unknown field fixture {name!r}; known: {fixture_names()}")
    return _FIXTURES[name](**params)


# ---------------------------------------------------------------------------
# compactly supported test functions
# ---------------------------------------------------------------------------


class Bump:
    """Smooth bump, value 1 at the center, supported on a disk."""

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        s2 = ((pts - self.center) ** 2).sum(axis=-1) / self.radius**2
        out = np.zeros(len(pts))
        ok = s2 < 1.0 - 1e-12
        out[ok] = np.exp(1.0 - 1.0 / (1.0 - s2[ok]))
        return out

    def gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rel = pts - self.center
        s2 = (rel**2).sum(axis=-1) / self.radius**2
        out = np.zeros_like(rel)
        ok = s2 < 1.0 - 1e-12
        u = 1.0 - s2[ok]
        scale = np.exp(1.0 - 1.0 / u) * (-2.0 / (u**2 * self.radius**2))
        out[ok] = scale[:, None] * rel[ok]
        return out


def bump_basis(ambient, n=3, inset=0.12):
    """n x n grid of bumps compactly supported inside the ambient region."""
    lo, hi = ambient.bounding_box
    span = hi - lo
    lo2 = lo + inset * span
    hi2 = hi - inset * span
    radius = 0.45 * float(np.min((hi2 - lo2) / n))
    bumps = []
    for i in range(n):
        for j in range(n):
            c = lo2 + (np.array([i, j]) + 0.5) * (hi2 - lo2) / n
            if bool(ambient.contains(c)) and ambient.signed_distance(c) < -radius:
                bumps.append(Bump(c, radius))
    return bumps


# ---------------------------------------------------------------------------
# weak validation, norms, divergence pairing
# ---------------------------------------------------------------------------


@dataclass
class WeakDivergenceReport:
    residuals: list
    statuses: list
    max_residual: float
    passed: bool
    tol: float


def verify_weak_divergence(field, ambient, tests=None, tol=1e-3):
    """Residuals of the weak identity against compactly supported tests.

    For each test function the报 residual is ``|int F . Dphi + int phi
    d(div F)|``; singular curves are handled by excising a shrinking tube
    and extrapolating, singular points by declared dyadic refinement.  A
    diverging excision limit flags a wrong declaration.
    """
    bumps = tests if tests is not None else bump_basis(ambient)
    residuals, statuses = [], []
    for bump in bumps:

        def integrand(p, bump=bump):
            with np.errstate(invalid="ignore"):
                vals = (field(p) * bump.gradient(p)).sum(axis=-1)
            return vals
        if field.singular_curves:
            lhs_res = _tube_excised_integral(integrand, field, ambient)
        else:
            res = q.integrate_region(
                integrand,
                ambient,
                tol=1e-8,
                singular_points=field.singular_points,
            )
            lhs_res = (res.value, res.error, res.status)
        lhs, lerr, status = lhs_res
        rhs, rerr = field.divergence.pairing(
            bump, ambient, singular_points=field.singular_points
        )
        residuals.append(abs(lhs + rhs))
        statuses.append(status)
    max_res = max(residuals) if residuals else 0.0
    passed = max_res <= tol and all(s == "converged" for s in statuses)
    return WeakDivergenceReport(residuals, statuses, max_res, passed, tol)


def _tube_excised_integral(integrand, field, ambient, steps=12, tol=1e-5):
    """Integral with shrinking tubes cut around declared singular curves.

    The excised remainder scales like a power of the tube width, so the
    plain sequence converges slowly; Aitken extrapolation on the geometric
    tail recovers the limit from moderate widths.
    """
    values = []
    accel = []
    delta = 0.125
    for _ in range(steps):
        dom = ambient
        for piece in field.singular_curves:
            dom = cut(dom, _tube_region(piece, delta))
        res = q.integrate_region(
            integrand, dom, tol=1e-8, singular_points=field.singular_points
        )
        values.append(res.value)
        if len(values) >= 3:
            d1 = values[-1] - values[-2]
            d0 = values[-2] - values[-3]
            if abs(d0) > 1e-300 and 0 < d1 / d0 < 0.95:
                rho = d1 / d0
                accel.append(values[-1] + d1 * rho / (1.0 - rho))
            else:
                accel.append(values[-1])
            if len(accel) >= 2 and abs(accel[-1] - accel[-2]) <= tol:
                return accel[-1], abs(accel[-1] - accel[-2]) + tol, "converged"
        delta *= 0.5
    if accel:
        return accel[-1], abs(accel[-1] - accel[-2]) if len(accel) > 1 else math.inf, "budget-exhausted"
    return values[-1], math.inf, "budget-exhausted"


def _tube_region(piece, delta):
    """Neighborhood of width delta around a straight boundary piece."""
    if not isinstance(piece, g.Segment):
        raise g.GeometryError("tube excision supports straight singular curves only")
    a = np.asarray(piece.a)
    b = np.asarray(piece.b)
    t = (b - a) / max(piece.length, 1e-300)
    n = np.array([-t[1], t[0]])
    side1 = g.HalfPlane(n, float(n @ a) + delta)
    side2 = g.HalfPlane(-n, float(-n @ a) + delta)
    return g.Intersection(side1, side2)


def dm_norm(field, ambient, p=None, tol=1e-6):
    """Field norm: L^p norm over the ambient set plus divergence variation."""
    p = field.p_class if p is None else p
    if p == 1:
        res = q.integrate_region(
            lambda pts: field.magnitude(pts),
            ambient,
            tol=tol,
            singular_points=field.singular_points,
        )
        if res.status == "diverging":
            raise ValueError(f"L1 norm of {field.name} diverges on this region")
        lp = res.value
    elif p == math.inf:
        for pt in field.singular_points:
            if float(ambient.signed_distance(np.asarray(pt, dtype=float))) <= 1e-12:
                raise ValueError(
                    f"sup norm of {field.name} is unbounded on this region "
                    "(declared singular point meets the closure)"
                )
        if field.singular_curves:
            raise ValueError(f"{field.name} has a singular curve; no sup norm")
        lo, hi = ambient.bounding_box
        n = 192
        xs = np.linspace(lo[0], hi[0], n)
        ys = np.linspace(lo[1], hi[1], n)
        pts = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
        pts = pts[np.asarray(ambient.contains(pts))]
        lp = float(np.max(field.magnitude(pts))) if len(pts) else 0.0
        if lp >= _CLAMP * 0.5:
            raise ValueError(f"sup norm of {field.name} is unbounded on this region")
    else:
        raise ValueError(f"unsupported integrability class p={p}")
    return lp + field.divergence.total_variation(ambient)


@dataclass
class DivergenceValue:
    value: float
    error: float
    status: str
    corner_atoms: list = dfield(default_factory=list)


def divergence_of(field, region, chi=None):
    """Divergence measure applied to a region with boundary weights.

    The absolutely continuous part integrates over the region (its essential
    interior differs by a null set); atoms are weighted by the classifier at
    their location; curve-concentrated parts integrate with pointwise
    classifier weights.  Atoms sitting exactly on corner points use the
    classified corner density and are flagged.
    """
    chi = chi or (lambda pt: 1.0 if bool(region.contains(pt)) else 0.0)
    total, err = 0.0, 0.0
    status = "converged"
    if field.divergence.density is not None:
        res = q.integrate_region(
            field.divergence.density,
            region,
            tol=1e-6,
            singular_points=field.singular_points,
        )
        total += res.value
        err += res.error
        if res.status != "converged":
            status = res.status
    corner_atoms = []
    for point, weight in field.divergence.atoms:
        pt = np.asarray(point, dtype=float)
        loc = g.locate(region, pt)
        if loc.kind == "other" and 0.0 < loc.density < 1.0:
            corner_atoms.append(tuple(point))
        total += weight * float(chi(pt))
    for piece, cdens in field.divergence.curve_parts:
        wfun = lambda pts: np.asarray(cdens(pts)) * np.array(
            [float(chi(x)) for x in np.atleast_2d(pts)]
        )
        res = q.integrate_curve(wfun, piece, tol=1e-9)
        total += res.value
        err += res.error
        if res.status != "converged":
            status = res.status
    return DivergenceValue(total, err, status, corner_atoms)
