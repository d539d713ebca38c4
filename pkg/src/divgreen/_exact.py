"""Closed-form areas for disk / polygon region patterns.

The quadtree integrator is the general route for areas of CSG regions;
whenever a region factors into halfplanes (boxes included) and at most one
essential disk, the area has a classic closed form which is much cheaper
and exact.  The measure evaluators lean on this for their innermost loops
(areas of sets intersected with small balls), falling back to quadrature
for anything unrecognized.

``intersection_area`` intersects regions *without* building validated CSG
nodes, so it stays usable for touching sets (partition cells, shrinking
balls) where transversality validation would refuse the construction.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry as g
from . import quadrature as q

__all__ = [
    "polygon_area",
    "clip_polygon",
    "circle_polygon_area",
    "lens_area",
    "exact_area",
    "region_area",
    "intersection_area",
    "meet",
]


def polygon_area(poly):
    """Signed shoelace area; positive for counterclockwise vertex order."""
    if len(poly) < 3:
        return 0.0
    v = np.asarray(poly, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def clip_polygon(poly, normal, offset):
    """Clip a polygon against the half-plane ``{x : n.x <= c}``."""
    n = np.asarray(normal, dtype=float)
    out = []
    m = len(poly)
    for i in range(m):
        s = np.asarray(poly[i], dtype=float)
        e = np.asarray(poly[(i + 1) % m], dtype=float)
        ds = float(s @ n) - offset
        de = float(e @ n) - offset
        if ds <= 0:
            out.append(s)
            if de > 0:
                t = ds / (ds - de)
                out.append(s + t * (e - s))
        elif de <= 0:
            t = ds / (ds - de)
            out.append(s + t * (e - s))
    return out


def _ang(u, v):
    return math.atan2(u[0] * v[1] - u[1] * v[0], float(u @ v))


def _circle_edge_area(p, q, r):
    """Green's-theorem contribution of one polygon edge to the disk overlap."""
    d = q - p
    a = float(d @ d)
    if a < 1e-300:
        return 0.0
    b = 2.0 * float(p @ d)
    c = float(p @ p) - r * r
    disc = b * b - 4.0 * a * c
    if disc <= 0:
        return 0.5 * r * r * _ang(p, q)
    sq = math.sqrt(disc)
    t1 = (-b - sq) / (2.0 * a)
    t2 = (-b + sq) / (2.0 * a)
    if t2 <= 0.0 or t1 >= 1.0:
        return 0.5 * r * r * _ang(p, q)
    t1c = max(t1, 0.0)
    t2c = min(t2, 1.0)
    pin = p + t1c * d
    qin = p + t2c * d
    area = 0.5 * (pin[0] * qin[1] - pin[1] * qin[0])
    if t1 > 0.0:
        area += 0.5 * r * r * _ang(p, pin)
    if t2 < 1.0:
        area += 0.5 * r * r * _ang(qin, q)
    return area


def circle_polygon_area(center, radius, poly):
    """Area of the intersection of a disk with a simple CCW polygon."""
    if len(poly) < 3:
        return 0.0
    c = np.asarray(center, dtype=float)
    total = 0.0
    m = len(poly)
    for i in range(m):
        p = np.asarray(poly[i], dtype=float) - c
        qv = np.asarray(poly[(i + 1) % m], dtype=float) - c
        total += _circle_edge_area(p, qv, radius)
    return max(total, 0.0)


def lens_area(c1, r1, c2, r2):
    """Area of the intersection of two disks."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    d = float(np.linalg.norm(c2 - c1))
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    a1 = 2.0 * math.acos(min(max((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0), 1.0))
    a2 = 2.0 * math.acos(min(max((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0), 1.0))
    return 0.5 * r1 * r1 * (a1 - math.sin(a1)) + 0.5 * r2 * r2 * (a2 - math.sin(a2))


# ---------------------------------------------------------------------------
# pattern dispatch
# ---------------------------------------------------------------------------


def _factors(region):
    """Flatten a region into disk / halfplane factors, or None if impossible."""
    if isinstance(region, g.Disk):
        return [("disk", region.center.copy(), region.radius)]
    if isinstance(region, g.HalfPlane):
        return [("hp", region.normal.copy(), region.offset)]
    if isinstance(region, g.Box):
        (x0, y0), (x1, y1) = region.lo, region.hi
        return [
            ("hp", np.array([-1.0, 0.0]), -x0),
            ("hp", np.array([1.0, 0.0]), x1),
            ("hp", np.array([0.0, -1.0]), -y0),
            ("hp", np.array([0.0, 1.0]), y1),
        ]
    if isinstance(region, g.Intersection):
        fa = _factors(region.a)
        fb = _factors(region.b)
        if fa is None or fb is None:
            return None
        return fa + fb
    if isinstance(region, _Meet):
        parts = [_factors(p) for p in region.parts]
        if any(p is None for p in parts):
            return None
        return [f for p in parts for f in p]
    return None


_MAX_TERMS = 96


def _signed_terms(region):
    """Inclusion-exclusion expansion into signed intersection monomials.

    Returns ``[(sign, [factor, ...]), ...]`` such that the indicator of the
    region equals the signed sum of the monomial indicators, or None when
    the region contains unexpandable nodes (offsets, empty placeholders).
    """
    if isinstance(region, (g.Disk, g.HalfPlane, g.Box)):
        return [(1, _factors(region))]
    if isinstance(region, g.Intersection):
        return _terms_product(_signed_terms(region.a), _signed_terms(region.b))
    if isinstance(region, _Meet):
        out = [(1, [])]
        for part in region.parts:
            out = _terms_product(out, _signed_terms(part))
            if out is None:
                return None
        return out
    if isinstance(region, g.Difference) or isinstance(region, _Cut):
        ta = _signed_terms(region.a)
        tb = _signed_terms(region.b)
        both = _terms_product(ta, tb)
        if ta is None or both is None:
            return None
        out = ta + [(-s, f) for s, f in both]
        return out if len(out) <= _MAX_TERMS else None
    if isinstance(region, g.Union):
        ta = _signed_terms(region.a)
        tb = _signed_terms(region.b)
        both = _terms_product(ta, tb)
        if ta is None or tb is None or both is None:
            return None
        out = ta + tb + [(-s, f) for s, f in both]
        return out if len(out) <= _MAX_TERMS else None
    return None


def _terms_product(ta, tb):
    if ta is None or tb is None:
        return None
    out = [(sa * sb, fa + fb) for sa, fa in ta for sb, fb in tb]
    return out if len(out) <= _MAX_TERMS else None


def _term_bbox(factors):
    los, his = [], []
    for fct in factors:
        if fct[0] == "disk":
            c, r = fct[1], fct[2]
            los.append(c - r)
            his.append(c + r)
        else:
            n, off = fct[1], fct[2]
            # axis-aligned halfplanes bound one coordinate
            if abs(n[0]) > 1 - 1e-12:
                if n[0] > 0:
                    his.append(np.array([off, np.inf]))
                else:
                    los.append(np.array([-off, -np.inf]))
            elif abs(n[1]) > 1 - 1e-12:
                if n[1] > 0:
                    his.append(np.array([np.inf, off]))
                else:
                    los.append(np.array([-np.inf, -off]))
    if not los and not his:
        return None
    lo = np.max(los, axis=0) if los else np.array([-np.inf, -np.inf])
    hi = np.min(his, axis=0) if his else np.array([np.inf, np.inf])
    if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
        return None
    return lo, np.maximum(hi, lo)


def _area_from_factors(factors, bbox):
    lo, hi = bbox
    if np.any(hi - lo <= 0):
        return 0.0
    poly = [
        np.array([lo[0], lo[1]]),
        np.array([hi[0], lo[1]]),
        np.array([hi[0], hi[1]]),
        np.array([lo[0], hi[1]]),
    ]
    disks = []
    had_hp = False
    for fct in factors:
        if fct[0] == "hp":
            had_hp = True
            poly = clip_polygon(poly, fct[1], fct[2])
            if len(poly) < 3:
                return 0.0
        else:
            disks.append((np.asarray(fct[1], float), float(fct[2])))
    # discard disks that contain another disk entirely
    kept = []
    for i, (ci, ri) in enumerate(disks):
        redundant = False
        for j, (cj, rj) in enumerate(disks):
            if i == j:
                continue
            d = float(np.linalg.norm(ci - cj))
            if d >= ri + rj:
                return 0.0  # disjoint disks
            if d + rj <= ri + 1e-12 and (rj < ri or (rj == ri and j < i)):
                redundant = True  # disk j sits inside disk i
        if not redundant:
            kept.append((ci, ri))
    if not kept:
        return polygon_area(poly)
    if len(kept) == 1:
        return circle_polygon_area(kept[0][0], kept[0][1], poly)
    if len(kept) == 2 and not had_hp:
        return lens_area(kept[0][0], kept[0][1], kept[1][0], kept[1][1])
    return None


def exact_area(region):
    """Closed-form area of a region, or None when no pattern applies."""
    if getattr(region, "is_empty", False):
        return 0.0
    if isinstance(region, g.Disk):
        return math.pi * region.radius**2
    if isinstance(region, g.Box):
        return float(np.prod(region.hi - region.lo))
    if isinstance(region, g.Offset):
        if isinstance(region.base, g.Box):
            base = region.base
            w, h = base.hi - base.lo
            d = region.delta
            if region.side == "outer":
                return float(w * h + 2.0 * (w + h) * d + math.pi * d * d)
            if w > 2 * d and h > 2 * d:
                return float((w - 2 * d) * (h - 2 * d))
            return 0.0
        return None
    return _meet_exact(region)


def _joint_bbox(regions):
    boxes = [r.bounding_box for r in regions if getattr(r, "bounded", True)]
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        return None
    lo = np.max([b[0] for b in boxes], axis=0)
    hi = np.min([b[1] for b in boxes], axis=0)
    return lo, np.maximum(hi, lo)


def _meet_exact(*regions):
    """Signed inclusion-exclusion area of an intersection of region trees."""
    terms = [(1, [])]
    for r in regions:
        terms = _terms_product(terms, _signed_terms(r))
        if terms is None:
            return None
    bb = _joint_bbox(regions)
    total = 0.0
    for sign, factors in terms:
        frame = bb if bb is not None else _term_bbox(factors)
        if frame is None:
            return None
        a = _area_from_factors(factors, frame)
        if a is None:
            return None
        total += sign * a
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# validation-free intersections and the public area helpers
# ---------------------------------------------------------------------------


class _Meet:
    """Intersection of regions by membership only (no CSG validation).

    The pseudo signed distance ``max`` of exact operand distances is a
    sound classifier for the quadtree (certainly-inside / certainly-outside
    decisions stay correct) even though it is not the true distance near
    re-entrant corners.
    """

    def __init__(self, parts):
        self.parts = list(parts)

    @property
    def is_empty(self):
        if any(getattr(p, "is_empty", False) for p in self.parts):
            return True
        bb = self.bounding_box
        return bb is not None and bool(np.any(bb[1] - bb[0] <= 0))

    @property
    def bounded(self):
        return any(getattr(p, "bounded", True) for p in self.parts)

    @property
    def bounding_box(self):
        return _joint_bbox(self.parts)

    @property
    def sdf_exact(self):
        return all(getattr(p, "sdf_exact", False) for p in self.parts)

    def contains(self, pts):
        out = None
        for p in self.parts:
            c = np.asarray(p.contains(pts))
            out = c if out is None else (out & c)
        return out

    def signed_distance(self, pts):
        out = None
        for p in self.parts:
            s = np.asarray(p.signed_distance(pts), dtype=float)
            out = s if out is None else np.maximum(out, s)
        return out

    def _primitive_curves(self):
        return [c for p in self.parts for c in p._primitive_curves()]

    def describe(self):
        return " & ".join(p.describe() for p in self.parts)


def meet(*regions):
    """Membership-level intersection of regions (no validation, no pieces)."""
    return _Meet(list(regions))


class _Cut:
    """Set difference ``a minus b`` by membership only (no CSG validation)."""

    def __init__(self, a, b):
        self.a = a
        self.b = b

    @property
    def is_empty(self):
        return getattr(self.a, "is_empty", False)

    @property
    def bounded(self):
        return getattr(self.a, "bounded", True)

    @property
    def bounding_box(self):
        return self.a.bounding_box

    @property
    def sdf_exact(self):
        return getattr(self.a, "sdf_exact", False) and getattr(
            self.b, "sdf_exact", False
        )

    def contains(self, pts):
        return np.asarray(self.a.contains(pts)) & ~np.asarray(self.b.contains(pts))

    def signed_distance(self, pts):
        sa = np.asarray(self.a.signed_distance(pts), dtype=float)
        sb = np.asarray(self.b.signed_distance(pts), dtype=float)
        return np.maximum(sa, -sb)

    def _primitive_curves(self):
        return self.a._primitive_curves() + self.b._primitive_curves()

    def describe(self):
        return f"{self.a.describe()} \\ {self.b.describe()}"


def cut(a, b):
    """Membership-level set difference (no validation, no pieces)."""
    return _Cut(a, b)


def region_area(region, rel_tol=1e-9, singular_points=()):
    """Area of a region: closed form when recognized, quadtree otherwise.

    Returns ``(value, error_bound)``.
    """
    if getattr(region, "is_empty", False):
        return 0.0, 0.0
    ea = exact_area(region)
    if ea is not None:
        return float(ea), 0.0
    bb = region.bounding_box
    if bb is None:
        raise g.GeometryError("area of an unbounded region")
    scale = float(np.prod(np.maximum(bb[1] - bb[0], 1e-300)))
    res = q.integrate_region(
        None, region, tol=max(rel_tol * scale, 1e-15), singular_points=singular_points
    )
    return float(res.value), float(res.error)


def intersection_area(*regions, rel_tol=1e-9):
    """Area of the intersection of regions without CSG construction."""
    if any(getattr(r, "is_empty", False) for r in regions):
        return 0.0, 0.0
    ea = _meet_exact(*regions)
    if ea is not None:
        return float(ea), 0.0
    m = meet(*regions)
    if m.is_empty:
        return 0.0, 0.0
    return region_area(m, rel_tol=rel_tol)
