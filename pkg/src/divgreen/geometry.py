"""Plane regions of finite perimeter built from CSG primitives.

Regions are trees of primitives (disks, axis-aligned boxes, half-planes)
combined by union / intersection / difference.  Membership is exact for
every point not lying on an operand boundary; signed distance is exact for
primitives and for bounded composites whose boundary pieces can be
enumerated, and falls back to a conservative min/max combination otherwise.

The reduced boundary of a valid region is a finite collection of segments
and circular arcs with an outward unit normal field; corner points are
excluded from the pieces and carried separately (they are H^1-null, so
curve integrals ignore them).

Validity requires that operand boundaries cross each other transversally
in finitely many points; tangential contact is rejected at construction
time because it produces ill-defined boundary normals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "Region",
    "Disk",
    "Box",
    "HalfPlane",
    "EmptyRegion",
    "Union",
    "Intersection",
    "Difference",
    "Offset",
    "Segment",
    "Arc",
    "BoundaryCurve",
    "PointClass",
    "reduced_boundary",
    "perimeter",
    "neighborhood",
    "shell_area",
    "locate",
    "classify_point",
    "region_from_json",
    "region_to_json",
]

_EPS = 1e-12
_TANGENCY_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid geometric construction or unsupported geometric query."""


def _as_points(p):
    """Normalize point input to an (N, 2) array; report if input was a single point."""
    a = np.asarray(p, dtype=float)
    if a.shape == (2,):
        return a[None, :], True
    if a.ndim == 2 and a.shape[1] == 2:
        return a, False
    raise ValueError(f"expected a point (2,) or points (N, 2), got shape {a.shape}")


def _unwrap(values, scalar):
    if scalar:
        v = values[0]
        return v.item() if isinstance(v, np.generic) else v
    return values


# ---------------------------------------------------------------------------
# boundary pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Straight boundary piece with a fixed outward unit normal."""

    a: tuple
    b: tuple
    normal: tuple

    @property
    def length(self):
        ax, ay = self.a
        bx, by = self.b
        return math.hypot(bx - ax, by - ay)

    @property
    def start(self):
        return np.asarray(self.a, float)

    @property
    def end(self):
        return np.asarray(self.b, float)

    def point_at(self, s):
        s = np.asarray(s, dtype=float)
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        L = self.length
        t = np.clip(s / L, 0.0, 1.0) if L > 0 else np.zeros_like(s)
        return a + np.multiply.outer(t, b - a)

    def normal_at(self, s):
        s = np.asarray(s, dtype=float)
        n = np.asarray(self.normal, float)
        return np.broadcast_to(n, s.shape + (2,)).copy()

    def tangent_at(self, s):
        s = np.asarray(s, dtype=float)
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        t = (b - a) / max(self.length, _EPS)
        return np.broadcast_to(t, s.shape + (2,)).copy()

    def distance(self, pts):
        a = np.asarray(self.a)
        b = np.asarray(self.b)
        d = b - a
        L2 = float(d @ d)
        if L2 <= _EPS**2:
            return np.linalg.norm(pts - a, axis=-1)
        t = np.clip(((pts - a) @ d) / L2, 0.0, 1.0)
        proj = a + t[..., None] * d
        return np.linalg.norm(pts - proj, axis=-1)

    def subdivide(self, params):
        """Split at sorted arc-length parameters strictly inside (0, length)."""
        cuts = [0.0] + [s for s in params if _EPS < s < self.length - _EPS] + [self.length]
        out = []
        for s0, s1 in zip(cuts[:-1], cuts[1:]):
            if s1 - s0 <= _EPS:
                continue
            p0 = self.point_at(np.array(s0))
            p1 = self.point_at(np.array(s1))
            out.append(Segment(tuple(p0), tuple(p1), self.normal))
        return out

    def midpoint(self):
        return 0.5 * (np.asarray(self.a) + np.asarray(self.b))


@dataclass(frozen=True)
class Arc:
    """Circular boundary piece, parametrized counterclockwise by arc length.

    ``normal_sign`` is +1 when the bounded region lies inside the circle
    (outward normal is radial) and -1 when it lies outside (a hole).
    """

    center: tuple
    radius: float
    ang0: float
    ang1: float
    normal_sign: int = 1

    @property
    def length(self):
        return self.radius * (self.ang1 - self.ang0)

    @property
    def start(self):
        return self.point_at(np.array(0.0))

    @property
    def end(self):
        return self.point_at(np.array(self.length))

    def _angles(self, s):
        s = np.asarray(s, dtype=float)
        return self.ang0 + np.clip(s, 0.0, self.length) / self.radius

    def point_at(self, s):
        th = self._angles(s)
        c = np.asarray(self.center)
        return c + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def normal_at(self, s):
        th = self._angles(s)
        return self.normal_sign * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def tangent_at(self, s):
        th = self._angles(s)
        return np.stack([-np.sin(th), np.cos(th)], axis=-1)

    def distance(self, pts):
        c = np.asarray(self.center)
        rel = pts - c
        rho = np.linalg.norm(rel, axis=-1)
        th = np.arctan2(rel[..., 1], rel[..., 0])
        span = self.ang1 - self.ang0
        rel_ang = np.mod(th - self.ang0, 2.0 * math.pi)
        on_arc = rel_ang <= span + _EPS
        d_radial = np.abs(rho - self.radius)
        d_ends = np.minimum(
            np.linalg.norm(pts - self.start, axis=-1),
            np.linalg.norm(pts - self.end, axis=-1),
        )
        return np.where(on_arc, d_radial, d_ends)

    def subdivide(self, params):
        cuts = [0.0] + [s for s in params if _EPS < s < self.length - _EPS] + [self.length]
        out = []
        for s0, s1 in zip(cuts[:-1], cuts[1:]):
            if s1 - s0 <= _EPS * max(1.0, self.radius):
                continue
            out.append(
                Arc(
                    self.center,
                    self.radius,
                    self.ang0 + s0 / self.radius,
                    self.ang0 + s1 / self.radius,
                    self.normal_sign,
                )
            )
        return out

    def midpoint(self):
        return self.point_at(np.array(0.5 * self.length))


@dataclass
class BoundaryCurve:
    """Chain of boundary pieces of one region with explicit corner points."""

    pieces: list
    corners: list
    region: "Region"

    @property
    def length(self):
        return sum(p.length for p in self.pieces)

    def __iter__(self):
        return iter(self.pieces)


# ---------------------------------------------------------------------------
# region base class
# ---------------------------------------------------------------------------


class Region:
    """Base class for plane regions; immutable after construction."""

    bounded = True

    def contains(self, p):
        pts, scalar = _as_points(p)
        return _unwrap(self._contains(pts), scalar)

    def signed_distance(self, p):
        """Signed distance to the region boundary, negative inside.

        Exact for primitives and for bounded composites with enumerable
        boundary pieces; otherwise a conservative min/max combination
        (``sdf_exact`` is False in that case).
        """
        pts, scalar = _as_points(p)
        return _unwrap(self._sdf(pts), scalar)

    # -- hooks -------------------------------------------------------------

    def _contains(self, pts):
        raise NotImplementedError

    def _sdf(self, pts):
        raise NotImplementedError

    @property
    def sdf_exact(self):
        return True

    @property
    def bounding_box(self):
        """(lo, hi) corners of an axis-aligned bounding box; None if unbounded."""
        raise NotImplementedError

    @property
    def is_empty(self):
        return False

    def _primitive_curves(self):
        """Infinite carriers (lines / circles / finite segments) of all operand boundaries."""
        raise NotImplementedError

    def _own_pieces(self, frame):
        """Boundary pieces of this node, already clipped against the subtree."""
        raise NotImplementedError

    # -- boundary (cached) ---------------------------------------------------

    def boundary_pieces(self):
        if not self.bounded:
            raise GeometryError("boundary pieces require a bounded region")
        cached = getattr(self, "_pieces_cache", None)
        if cached is None:
            frame = _frame_for(self)
            cached = [p for p in self._own_pieces(frame) if p.length > 1e-11]
            object.__setattr__(self, "_pieces_cache", cached)
        return cached

    def corner_points(self):
        cached = getattr(self, "_corners_cache", None)
        if cached is None:
            cached = _find_corners(self.boundary_pieces())
            object.__setattr__(self, "_corners_cache", cached)
        return cached

    def boundary_distance(self, p):
        """Exact distance to the region boundary via its pieces."""
        pts, scalar = _as_points(p)
        pieces = self.boundary_pieces()
        if not pieces:
            return _unwrap(np.full(len(pts), np.inf), scalar)
        d = np.min(np.stack([pc.distance(pts) for pc in pieces]), axis=0)
        return _unwrap(d, scalar)

    # -- operators -----------------------------------------------------------

    def __or__(self, other):
        return Union(self, other)

    def __and__(self, other):
        return Intersection(self, other)

    def __sub__(self, other):
        return Difference(self, other)

    def describe(self):
        return type(self).__name__.lower()


class EmptyRegion(Region):
    """The empty set; used to report vanished inner offsets."""

    def __init__(self, note=""):
        self.note = note

    @property
    def is_empty(self):
        return True

    def _contains(self, pts):
        return np.zeros(len(pts), dtype=bool)

    def _sdf(self, pts):
        return np.full(len(pts), np.inf)

    @property
    def bounding_box(self):
        z = np.zeros(2)
        return z, z

    def _primitive_curves(self):
        return []

    def _own_pieces(self, frame):
        return []

    def describe(self):
        return "empty" + (f" ({self.note})" if self.note else "")


class Disk(Region):
    def __init__(self, center, radius):
        if radius <= 0:
            raise GeometryError("disk radius must be positive")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)

    def _contains(self, pts):
        return np.linalg.norm(pts - self.center, axis=-1) <= self.radius

    def _sdf(self, pts):
        return np.linalg.norm(pts - self.center, axis=-1) - self.radius

    @property
    def bounding_box(self):
        r = np.array([self.radius, self.radius])
        return self.center - r, self.center + r

    def _primitive_curves(self):
        return [("circle", tuple(self.center), self.radius)]

    def _own_pieces(self, frame):
        return [Arc(tuple(self.center), self.radius, 0.0, 2.0 * math.pi, 1)]

    def describe(self):
        return f"disk(center=({self.center[0]:g},{self.center[1]:g}), r={self.radius:g})"


class Box(Region):
    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if not np.all(self.hi > self.lo):
            raise GeometryError("box needs hi > lo in both coordinates")

    def _contains(self, pts):
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=-1)

    def _sdf(self, pts):
        c = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo)
        q = np.abs(pts - c) - half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside

    @property
    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def corners(self):
        (x0, y0), (x1, y1) = self.lo, self.hi
        return [np.array(p) for p in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))]

    def _primitive_curves(self):
        (x0, y0), (x1, y1) = self.lo, self.hi
        pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
        return [("segment", pts[i], pts[i + 1]) for i in range(4)]

    def _own_pieces(self, frame):
        (x0, y0), (x1, y1) = self.lo, self.hi
        return [
            Segment((x0, y0), (x1, y0), (0.0, -1.0)),
            Segment((x1, y0), (x1, y1), (1.0, 0.0)),
            Segment((x1, y1), (x0, y1), (0.0, 1.0)),
            Segment((x0, y1), (x0, y0), (-1.0, 0.0)),
        ]

    def describe(self):
        return (
            f"box([{self.lo[0]:g},{self.lo[1]:g}]x[{self.hi[0]:g},{self.hi[1]:g}])"
        )


class HalfPlane(Region):
    """Closed half-plane ``{x : n.x <= c}``; only valid as a clipping operand."""

    bounded = False

    def __init__(self, normal, offset):
        n = np.asarray(normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn <= 0:
            raise GeometryError("half-plane normal must be nonzero")
        self.normal = n / nn
        self.offset = float(offset) / nn

    def _contains(self, pts):
        return pts @ self.normal <= self.offset

    def _sdf(self, pts):
        return pts @ self.normal - self.offset

    @property
    def bounding_box(self):
        return None

    def _primitive_curves(self):
        return [("line", tuple(self.normal), self.offset)]

    def _own_pieces(self, frame):
        n = self.normal
        t = np.array([-n[1], n[0]])
        p0 = self.offset * n
        c, half = frame
        reach = float(np.linalg.norm(half) + np.linalg.norm(p0 - c)) + 1.0
        a = p0 - reach * t
        b = p0 + reach * t
        return [Segment(tuple(a), tuple(b), tuple(n))]

    def describe(self):
        return f"halfplane(n=({self.normal[0]:g},{self.normal[1]:g}), c={self.offset:g})"


# ---------------------------------------------------------------------------
# primitive curve intersection with tangency detection
# ---------------------------------------------------------------------------


def _curve_hits(c1, c2):
    """Intersection points of two primitive boundary curves.

    Raises ``GeometryError`` on tangential contact (grazing or overlap);
    returns the finite list of transversal crossing points.
    """
    k1, k2 = c1[0], c2[0]
    if k1 > k2:  # canonical order: circle < line < segment
        pts = _curve_hits(c2, c1)
        return pts
    if k1 == "circle" and k2 == "circle":
        return _hits_circle_circle(c1, c2)
    if k1 == "circle" and k2 in ("line", "segment"):
        return _hits_circle_linear(c1, c2)
    return _hits_linear_linear(c1, c2)


def _linear_params(c):
    """(point, direction, span) for a line or segment carrier."""
    if c[0] == "line":
        n = np.asarray(c[1], float)
        p0 = c[2] * n
        d = np.array([-n[1], n[0]])
        return p0, d, None
    a = np.asarray(c[1], float)
    b = np.asarray(c[2], float)
    return a, b - a, 1.0


def _hits_linear_linear(c1, c2):
    p1, d1, span1 = _linear_params(c1)
    p2, d2, span2 = _linear_params(c2)
    s1 = np.linalg.norm(d1) or 1.0
    s2 = np.linalg.norm(d2) or 1.0
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < _TANGENCY_TOL * s1 * s2:
        # parallel: tolerate unless the carriers coincide and overlap
        off = p2 - p1
        dist = abs(off[0] * d1[1] - off[1] * d1[0]) / s1
        if dist >= _TANGENCY_TOL * max(1.0, s1):
            return []
        if span1 is None or span2 is None:
            raise GeometryError("tangential contact: coincident line carriers")
        t0 = (p2 - p1) @ d1 / (s1 * s1)
        t1 = t0 + (d2 @ d1) / (s1 * s1)
        lo, hi = min(t0, t1), max(t0, t1)
        if hi > _TANGENCY_TOL and lo < 1.0 - _TANGENCY_TOL:
            raise GeometryError("tangential contact: overlapping collinear segments")
        return []
    rhs = p2 - p1
    t = (rhs[0] * d2[1] - rhs[1] * d2[0]) / cross
    u = (rhs[0] * d1[1] - rhs[1] * d1[0]) / cross
    if span1 is not None and not (-_TANGENCY_TOL <= t <= 1.0 + _TANGENCY_TOL):
        return []
    if span2 is not None and not (-_TANGENCY_TOL <= u <= 1.0 + _TANGENCY_TOL):
        return []
    return [p1 + t * d1]


def _hits_circle_linear(circ, lin):
    c = np.asarray(circ[1], float)
    r = circ[2]
    p0, d, span = _linear_params(lin)
    dn = np.linalg.norm(d)
    u = d / dn
    proj = (c - p0) @ u
    foot = p0 + proj * u
    h = np.linalg.norm(c - foot)
    if abs(h - r) < _TANGENCY_TOL * max(1.0, r):
        # grazing contact only counts if the touch point lies on the segment
        t = proj / dn
        if span is None or (-_TANGENCY_TOL <= t <= 1.0 + _TANGENCY_TOL):
            raise GeometryError("tangential contact: line grazes circle")
        return []
    if h > r:
        return []
    half = math.sqrt(max(r * r - h * h, 0.0))
    out = []
    for s in (-half, half):
        t = (proj + s) / dn
        if span is not None and not (-_TANGENCY_TOL <= t <= 1.0 + _TANGENCY_TOL):
            continue
        out.append(p0 + (proj + s) * u)
    return out


def _hits_circle_circle(c1, c2):
    p1, r1 = np.asarray(c1[1], float), c1[2]
    p2, r2 = np.asarray(c2[1], float), c2[2]
    d = np.linalg.norm(p2 - p1)
    scale = max(1.0, r1, r2)
    if d < _TANGENCY_TOL and abs(r1 - r2) < _TANGENCY_TOL * scale:
        raise GeometryError("tangential contact: coincident circles")
    if abs(d - (r1 + r2)) < _TANGENCY_TOL * scale or (
        d > _TANGENCY_TOL and abs(d - abs(r1 - r2)) < _TANGENCY_TOL * scale
    ):
        raise GeometryError("tangential contact: circles touch")
    if d > r1 + r2 or d < abs(r1 - r2) or d < _TANGENCY_TOL:
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - a * a
    if h2 < 0:
        return []
    h = math.sqrt(h2)
    u = (p2 - p1) / d
    v = np.array([-u[1], u[0]])
    base = p1 + a * u
    return [base + h * v, base - h * v]


def _validate_pair(a, b):
    hits = 0
    for c1 in a._primitive_curves():
        for c2 in b._primitive_curves():
            try:
                hits += len(_curve_hits(c1, c2))
            except GeometryError as exc:
                raise GeometryError(
                    f"invalid CSG combination of {a.describe()} and {b.describe()}: {exc}"
                ) from exc
    return hits


# ---------------------------------------------------------------------------
# CSG nodes
# ---------------------------------------------------------------------------


class _BinaryNode(Region):
    _op = "?"

    def __init__(self, a, b):
        if not isinstance(a, Region) or not isinstance(b, Region):
            raise GeometryError("CSG operands must be regions")
        self.a = a
        self.b = b
        if not (a.is_empty or b.is_empty):
            _validate_pair(a, b)

    @property
    def sdf_exact(self):
        if self.bounded and not self.is_empty:
            return True  # piece-based distance
        return False

    def _sdf(self, pts):
        if self.bounded and not self.is_empty:
            d = self.boundary_distance(pts)
            if np.ndim(d) == 0:
                d = np.asarray([d])
            inside = self._contains(pts)
            return np.where(inside, -d, d)
        return self._sdf_minmax(pts)

    def _sdf_minmax(self, pts):
        raise NotImplementedError

    def _primitive_curves(self):
        return self.a._primitive_curves() + self.b._primitive_curves()

    def describe(self):
        return f"({self.a.describe()} {self._op} {self.b.describe()})"


def _sdf_of(r, pts):
    # children may themselves be composites; use their public vector path
    return r._sdf(pts)


class Union(_BinaryNode):
    _op = "|"

    def _contains(self, pts):
        return self.a._contains(pts) | self.b._contains(pts)

    def _sdf_minmax(self, pts):
        return np.minimum(_sdf_of(self.a, pts), _sdf_of(self.b, pts))

    @property
    def bounded(self):
        return self.a.bounded and self.b.bounded

    @property
    def bounding_box(self):
        if not self.bounded:
            return None
        alo, ahi = self.a.bounding_box
        blo, bhi = self.b.bounding_box
        return np.minimum(alo, blo), np.maximum(ahi, bhi)

    def _own_pieces(self, frame):
        keep_a = _clip_pieces(self.a._own_pieces(frame), self.b, keep_inside=False)
        keep_b = _clip_pieces(self.b._own_pieces(frame), self.a, keep_inside=False)
        return keep_a + keep_b


class Intersection(_BinaryNode):
    _op = "&"

    def _contains(self, pts):
        return self.a._contains(pts) & self.b._contains(pts)

    def _sdf_minmax(self, pts):
        return np.maximum(_sdf_of(self.a, pts), _sdf_of(self.b, pts))

    @property
    def bounded(self):
        return self.a.bounded or self.b.bounded

    @property
    def bounding_box(self):
        boxes = [r.bounding_box for r in (self.a, self.b) if r.bounded]
        if not boxes:
            return None
        lo = np.max([b[0] for b in boxes], axis=0)
        hi = np.min([b[1] for b in boxes], axis=0)
        hi = np.maximum(hi, lo)  # possibly empty intersection
        return lo, hi

    def _own_pieces(self, frame):
        keep_a = _clip_pieces(self.a._own_pieces(frame), self.b, keep_inside=True)
        keep_b = _clip_pieces(self.b._own_pieces(frame), self.a, keep_inside=True)
        return keep_a + keep_b


class Difference(_BinaryNode):
    _op = "-"

    def _contains(self, pts):
        return self.a._contains(pts) & ~self.b._contains(pts)

    def _sdf_minmax(self, pts):
        return np.maximum(_sdf_of(self.a, pts), -_sdf_of(self.b, pts))

    @property
    def bounded(self):
        return self.a.bounded

    @property
    def bounding_box(self):
        return self.a.bounding_box

    def _own_pieces(self, frame):
        keep_a = _clip_pieces(self.a._own_pieces(frame), self.b, keep_inside=False)
        keep_b = _clip_pieces(self.b._own_pieces(frame), self.a, keep_inside=True)
        return keep_a + [_flip(p) for p in keep_b]


def _flip(piece):
    if isinstance(piece, Segment):
        n = piece.normal
        return Segment(piece.a, piece.b, (-n[0], -n[1]))
    return Arc(piece.center, piece.radius, piece.ang0, piece.ang1, -piece.normal_sign)


class Offset(Region):
    """Outer or inner offset of a base region, defined through level sets.

    Membership is exact whenever the base signed distance is exact.
    Boundary pieces are available only for box bases (rounded box for the
    outer side); other offsets support membership and area queries only.
    """

    def __init__(self, base, delta, side):
        if side not in ("outer", "inner"):
            raise GeometryError("offset side must be 'outer' or 'inner'")
        if delta <= 0:
            raise GeometryError("offset delta must be positive")
        if not base.bounded:
            raise GeometryError("offset base must be bounded")
        self.base = base
        self.delta = float(delta)
        self.side = side

    @property
    def _level(self):
        return self.delta if self.side == "outer" else -self.delta

    def _contains(self, pts):
        return self.base._sdf(pts) <= self._level

    def _sdf(self, pts):
        return self.base._sdf(pts) - self._level

    @property
    def sdf_exact(self):
        return self.base.sdf_exact

    @property
    def bounding_box(self):
        lo, hi = self.base.bounding_box
        if self.side == "outer":
            return lo - self.delta, hi + self.delta
        return lo, hi

    def _primitive_curves(self):
        # conservative: offsets are not meant as CSG operands of further
        # validated nodes except through quadrature-only constructions
        return []

    def _own_pieces(self, frame):
        if isinstance(self.base, Box):
            if self.side == "inner":
                inner = Box(self.base.lo + self.delta, self.base.hi - self.delta)
                return inner._own_pieces(frame)
            return _rounded_box_pieces(self.base, self.delta)
        raise GeometryError(
            "boundary pieces of composite offsets are not supported; "
            "use membership / area queries instead"
        )

    def describe(self):
        return f"offset({self.base.describe()}, {self.side}, {self.delta:g})"


def _rounded_box_pieces(box, d):
    (x0, y0), (x1, y1) = box.lo, box.hi
    pi = math.pi
    return [
        Segment((x0, y0 - d), (x1, y0 - d), (0.0, -1.0)),
        Arc((x1, y0), d, -0.5 * pi, 0.0, 1),
        Segment((x1 + d, y0), (x1 + d, y1), (1.0, 0.0)),
        Arc((x1, y1), d, 0.0, 0.5 * pi, 1),
        Segment((x1, y1 + d), (x0, y1 + d), (0.0, 1.0)),
        Arc((x0, y1), d, 0.5 * pi, pi, 1),
        Segment((x0 - d, y1), (x0 - d, y0), (-1.0, 0.0)),
        Arc((x0, y0), d, pi, 1.5 * pi, 1),
    ]


# ---------------------------------------------------------------------------
# boundary assembly
# ---------------------------------------------------------------------------


def _frame_for(region):
    bb = region.bounding_box
    if bb is None:
        raise GeometryError("cannot build boundary of an unbounded region")
    lo, hi = bb
    c = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) + 1.0
    return c, half


def _piece_cut_params(piece, other):
    """Arc-length parameters where `piece` crosses any operand boundary of `other`."""
    params = []
    if isinstance(piece, Segment):
        carrier = ("segment", piece.a, piece.b)
    else:
        carrier = ("circle", piece.center, piece.radius)
    for oc in other._primitive_curves():
        try:
            hits = _curve_hits(carrier, oc)
        except GeometryError:
            # tangency against a clipping window: treat the touch point as a cut
            hits = []
        for h in hits:
            s = _param_on_piece(piece, h)
            if s is not None:
                params.append(s)
    return sorted(params)


def _param_on_piece(piece, point):
    if isinstance(piece, Segment):
        a = np.asarray(piece.a)
        b = np.asarray(piece.b)
        d = b - a
        L = piece.length
        if L <= _EPS:
            return None
        t = float((np.asarray(point) - a) @ d) / (L * L)
        if -1e-9 <= t <= 1 + 1e-9:
            s = t * L
            if np.linalg.norm(piece.point_at(np.array(s)) - point) < 1e-7 * max(1.0, L):
                return min(max(s, 0.0), L)
        return None
    c = np.asarray(piece.center)
    rel = np.asarray(point) - c
    if abs(np.linalg.norm(rel) - piece.radius) > 1e-7 * max(1.0, piece.radius):
        return None
    th = math.atan2(rel[1], rel[0])
    rel_ang = (th - piece.ang0) % (2.0 * math.pi)
    span = piece.ang1 - piece.ang0
    if rel_ang <= span + 1e-9:
        return min(rel_ang, span) * piece.radius
    return None


def _clip_pieces(pieces, other, keep_inside):
    out = []
    for piece in pieces:
        cuts = _piece_cut_params(piece, other)
        for sub in piece.subdivide(cuts):
            mid = sub.midpoint()
            inside = bool(other.contains(mid))
            if inside == keep_inside:
                out.append(sub)
    return out


def _find_corners(pieces):
    """Junction points where two pieces meet with distinct tangent directions."""
    endpoints = []
    for i, p in enumerate(pieces):
        endpoints.append((p.start, p.tangent_at(np.array(0.0)), i))
        endpoints.append((p.end, p.tangent_at(np.array(p.length)), i))
    corners = []
    used = np.zeros(len(endpoints), dtype=bool)
    for i in range(len(endpoints)):
        if used[i]:
            continue
        pi, ti, owner_i = endpoints[i]
        group = [i]
        for j in range(i + 1, len(endpoints)):
            if used[j]:
                continue
            pj = endpoints[j][0]
            if np.linalg.norm(pi - pj) < 1e-9:
                group.append(j)
        if len(group) < 2:
            continue
        for j in group:
            used[j] = True
        tangents = [endpoints[j][1] for j in group]
        is_corner = False
        for ta in tangents:
            for tb in tangents:
                if abs(ta[0] * tb[1] - ta[1] * tb[0]) > 1e-7:
                    is_corner = True
        if is_corner:
            corners.append(pi.copy())
    return corners


def _chain_pieces(pieces):
    """Group pieces into connected chains by shared endpoints."""
    n = len(pieces)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pts = []
    for p in pieces:
        pts.append((p.start, p.end))
    for i in range(n):
        for j in range(i + 1, n):
            close = any(
                np.linalg.norm(pi - pj) < 1e-9 for pi in pts[i] for pj in pts[j]
            )
            if close:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(pieces[i])
    return list(groups.values())


def reduced_boundary(region, window=None):
    """Boundary chains of a region, optionally clipped to a window region.

    Corner points are excluded from the pieces and listed on each chain.
    """
    if region.is_empty:
        return []
    pieces = region.boundary_pieces()
    corners = region.corner_points()
    if window is not None:
        pieces = _clip_pieces(pieces, window, keep_inside=True)
        corners = [c for c in corners if bool(window.contains(c))]
    curves = []
    for chain in _chain_pieces(pieces):
        chain_corners = [
            c
            for c in corners
            if min(float(pc.distance(c[None, :])[0]) for pc in chain) < 1e-9
        ]
        curves.append(BoundaryCurve(chain, chain_corners, region))
    return curves


def perimeter(region, window=None):
    """Total length of the reduced boundary clipped to an optional window."""
    return float(sum(c.length for c in reduced_boundary(region, window)))


def neighborhood(region, delta, side, cap=10.0):
    """Outer delta-neighborhood or inner delta-core of a region.

    Disk and inner box offsets stay primitives; other offsets become level
    set regions.  An empty inner offset is reported through an
    ``EmptyRegion`` carrying a note, not an exception.
    """
    if delta <= 0:
        raise GeometryError("neighborhood delta must be positive")
    if delta > cap:
        raise GeometryError(f"neighborhood delta {delta} exceeds cap {cap}")
    if side not in ("outer", "inner"):
        raise GeometryError("side must be 'outer' or 'inner'")
    if isinstance(region, Disk):
        r = region.radius + delta if side == "outer" else region.radius - delta
        if r <= 0:
            return EmptyRegion("inner offset exceeds disk radius")
        return Disk(region.center, r)
    if isinstance(region, Box) and side == "inner":
        lo = region.lo + delta
        hi = region.hi - delta
        if not np.all(hi > lo):
            return EmptyRegion("inner offset exceeds box half-width")
        return Box(lo, hi)
    if side == "inner":
        lo, hi = region.bounding_box
        n = 96
        gx = np.linspace(lo[0], hi[0], n)
        gy = np.linspace(lo[1], hi[1], n)
        pts = np.stack(np.meshgrid(gx, gy), axis=-1).reshape(-1, 2)
        if float(np.min(region._sdf(pts))) > -delta:
            return EmptyRegion("inner offset empty at probe resolution")
    return Offset(region, delta, side)


def shell_area(region, delta, side):
    """Length of the boundary of the delta-offset region."""
    return perimeter(neighborhood(region, delta, side))


def offset_region(region, delta, side):
    """Exactly constructible offset region, or None when unsupported.

    Inner offsets distribute over intersections (the distance to the
    complement is the minimum of the operand distances), so intersection
    trees of primitives offset exactly; outer offsets only do for
    primitives.  Tangential contact introduced at special offsets makes
    the construction invalid; those offsets return None as well.
    """
    try:
        if isinstance(region, (Disk, Box)):
            return neighborhood(region, delta, side)
        if isinstance(region, HalfPlane):
            sign = 1.0 if side == "outer" else -1.0
            return HalfPlane(region.normal, region.offset + sign * delta)
        if isinstance(region, Intersection) and side == "inner":
            a = offset_region(region.a, delta, side)
            b = offset_region(region.b, delta, side)
            if a is None or b is None:
                return None
            if a.is_empty or b.is_empty:
                return EmptyRegion("inner offset vanished")
            return Intersection(a, b)
    except GeometryError:
        return None
    return None


# ---------------------------------------------------------------------------
# point classification
# ---------------------------------------------------------------------------


@dataclass
class PointClass:
    """Measure-theoretic point class with the estimated area density."""

    kind: str  # essential-interior | essential-exterior | reduced-boundary | other
    density: float
    status: str = "converged"
    normal: tuple | None = None
    trace: list = field(default_factory=list)

    _KINDS = ("essential-interior", "essential-exterior", "reduced-boundary", "other")


_DENSITY_CLASS_TOL = 1e-2


def _density_to_kind(density, normal_ok):
    if abs(density - 1.0) <= _DENSITY_CLASS_TOL:
        return "essential-interior"
    if abs(density) <= _DENSITY_CLASS_TOL:
        return "essential-exterior"
    if abs(density - 0.5) <= _DENSITY_CLASS_TOL and normal_ok:
        return "reduced-boundary"
    return "other"


def corner_density(region, point, n_dirs=256):
    """Fraction of directions entering the region at a boundary point.

    Transition angles are refined by bisection, so the result is accurate
    far beyond the angular sampling resolution for piecewise-smooth
    boundaries.
    """
    p = np.asarray(point, dtype=float)
    lo, hi = region.bounding_box
    eps = 1e-7 * max(1.0, float(np.max(hi - lo)))
    th = np.linspace(0.0, 2.0 * math.pi, n_dirs, endpoint=False)
    dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    inside = region._contains(p + eps * dirs)
    if inside.all():
        return 1.0
    if not inside.any():
        return 0.0
    frac = float(np.mean(inside))
    # refine every in/out transition
    correction = 0.0
    step = 2.0 * math.pi / n_dirs
    for i in range(n_dirs):
        j = (i + 1) % n_dirs
        if inside[i] == inside[j]:
            continue
        a, b = th[i], th[i] + step
        fa = inside[i]
        for _ in range(40):
            m = 0.5 * (a + b)
            fm = bool(region.contains(p + eps * np.array([math.cos(m), math.sin(m)])))
            if fm == fa:
                a = m
            else:
                b = m
        # replace the sampled half-step by the refined transition point
        t_refined = 0.5 * (a + b)
        if fa:  # leaving the region between th[i] and transition
            correction += (t_refined - th[i] - 0.5 * step) / (2.0 * math.pi)
        else:
            correction -= (t_refined - th[i] - 0.5 * step) / (2.0 * math.pi)
    return min(max(frac + correction, 0.0), 1.0)


def locate(region, point, tol=1e-9):
    """Fast geometric point classification via exact boundary distance.

    Uses the boundary pieces directly instead of a density limit; agrees
    with ``classify_point`` on piecewise-smooth fixtures and is cheap
    enough for quadrature nodes.
    """
    p = np.asarray(point, dtype=float)
    if region.is_empty:
        return PointClass("essential-exterior", 0.0)
    d = float(region.boundary_distance(p))
    if d > tol:
        if bool(region.contains(p)):
            return PointClass("essential-interior", 1.0)
        return PointClass("essential-exterior", 0.0)
    for c in region.corner_points():
        if np.linalg.norm(p - c) <= max(tol, 1e-9):
            dens = corner_density(region, c)
            return PointClass(_density_to_kind(dens, normal_ok=False), dens)
    # on a smooth boundary piece: find the supporting normal
    best = None
    for piece in region.boundary_pieces():
        dd = float(piece.distance(p[None, :])[0])
        if best is None or dd < best[0]:
            s = _foot_param(piece, p)
            best = (dd, piece, s)
    _, piece, s = best
    n = piece.normal_at(np.array(s))
    return PointClass("reduced-boundary", 0.5, normal=(float(n[0]), float(n[1])))


def _foot_param(piece, p):
    if isinstance(piece, Segment):
        a = np.asarray(piece.a)
        b = np.asarray(piece.b)
        L = piece.length
        t = float((p - a) @ (b - a)) / max(L * L, _EPS)
        return min(max(t, 0.0), 1.0) * L
    rel = p - np.asarray(piece.center)
    th = math.atan2(rel[1], rel[0])
    rel_ang = (th - piece.ang0) % (2.0 * math.pi)
    span = piece.ang1 - piece.ang0
    return min(rel_ang, span) * piece.radius


def classify_point(region, point, schedule=None):
    """Density-limit classification of a point relative to a region.

    Estimates ``lim area(region / ball) / area(ball)`` along the scale
    schedule and assigns the class by proximity to {0, 1/2, 1}; reports a
    ``no-limit`` status when the extrapolation oscillates.
    """
    from . import quadrature as q

    if schedule is None:
        schedule = q.ScaleSchedule(initial=0.25, steps=14, tolerance=1e-4)
    p = np.asarray(point, dtype=float)

    normals = []

    def seq(delta):
        ball = Disk(p, delta)
        ball_area = math.pi * delta * delta
        inter, err = _safe_intersection_area(region, ball)
        normals.append(_density_gradient_dir(region, p, delta))
        return inter / ball_area, err / ball_area

    res = q.limit_extrapolate(seq, schedule)
    density = min(max(res.value, 0.0), 1.0)
    if res.status == "no-limit":
        return PointClass("other", density, status="no-limit", trace=res.trace)
    normal_ok = _direction_stable(normals)
    kind = _density_to_kind(density, normal_ok)
    nrm = tuple(normals[-1]) if (normal_ok and normals[-1] is not None) else None
    return PointClass(kind, density, status=res.status, normal=nrm, trace=res.trace)


def _safe_intersection_area(region, ball):
    from ._exact import intersection_area

    return intersection_area(region, ball)


def _density_gradient_dir(region, p, delta):
    """Unit direction of the complement's first moment inside a small ball."""
    th = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    for rad in (0.5 * delta, 0.75 * delta):
        ring = p + rad * np.stack([np.cos(th), np.sin(th)], axis=-1)
        inside = region._contains(ring)
        if inside.all() or not inside.any():
            continue
        m = np.mean(ring[~inside] - p, axis=0)
        nn = np.linalg.norm(m)
        if nn > _EPS:
            return m / nn
    return None


def _direction_stable(normals, tol=2e-2):
    ns = [n for n in normals[-3:] if n is not None]
    if len(ns) < 2:
        return False
    for a, b in zip(ns[:-1], ns[1:]):
        if float(a @ b) < 1.0 - tol:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON fixture schema
# ---------------------------------------------------------------------------

_OPS = {"union": Union, "inter": Intersection, "diff": Difference}


def region_from_json(obj):
    """Build a region from the fixture-file JSON tree.

    ``{"op":"diff","a":{"box":[[0,0],[1,1]]},"b":{"disk":[[0,0],0.5]}}``
    """
    if not isinstance(obj, dict):
        raise GeometryError(f"region JSON must be an object, got {type(obj).__name__}")
    if "op" in obj:
        op = obj["op"]
        if op not in _OPS:
            raise GeometryError(f"unknown region op {op!r}")
        return _OPS[op](region_from_json(obj["a"]), region_from_json(obj["b"]))
    if "disk" in obj:
        center, radius = obj["disk"]
        return Disk(center, radius)
    if "box" in obj:
        lo, hi = obj["box"]
        return Box(lo, hi)
    if "halfplane" in obj:
        normal, offset = obj["halfplane"]
        return HalfPlane(normal, offset)
    raise GeometryError(f"unknown region spec {sorted(obj)}")


def region_to_json(region):
    if isinstance(region, Disk):
        return {"disk": [[float(region.center[0]), float(region.center[1])], region.radius]}
    if isinstance(region, Box):
        return {"box": [list(map(float, region.lo)), list(map(float, region.hi))]}
    if isinstance(region, HalfPlane):
        return {
            "halfplane": [
                [float(region.normal[0]), float(region.normal[1])],
                float(region.offset),
            ]
        }
    for op, cls in _OPS.items():
        if isinstance(region, cls):
            return {"op": op, "a": region_to_json(region.a), "b": region_to_json(region.b)}
    raise GeometryError(f"cannot serialize region {region.describe()}")
