"""Convex geometry of finite half-plane families in the complex plane.

A :class:`HalfPlane` with angle ``t`` and offset ``h`` is the set of points
``mu = x + iy`` with ``2 Re(e^{it} mu) = 2 (x cos t - y sin t) <= h``. Its unit
outward normal is therefore ``(cos t, -sin t)`` and the coefficient vector has
Euclidean length 2, which the Chebyshev linear program accounts for.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import shapely
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .conf import get_settings
from .exceptions import EmptyRegion, Unbounded

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# HiGHS defaults (1e-7) are looser than the point and segment classification
HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class HalfPlane:
    angle: float
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % TWO_PI)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def coefficients(self):
        return np.array([2.0 * math.cos(self.angle), -2.0 * math.sin(self.angle)])

    def value(self, z):
        """``2 Re(e^{it} z)`` for a scalar or an array of complex points."""
        return 2.0 * np.real(np.exp(1j * self.angle) * np.asarray(z))

    def slack(self, z):
        return self.offset - self.value(z)

    def contains(self, z, tol=0.0):
        return bool(np.all(self.slack(z) >= -tol))


def halfplanes(angles, offsets):
    return [HalfPlane(t, h) for t, h in zip(angles, offsets)]


class RegionKind(str, Enum):
    EMPTY = "empty"
    POINT = "point"
    SEGMENT = "segment"
    POLYGON = "polygon"


@dataclass(frozen=True)
class ConvexRegion:
    kind: RegionKind
    vertices: tuple = ()

    @classmethod
    def empty(cls):
        return cls(RegionKind.EMPTY, ())

    @classmethod
    def point(cls, z):
        return cls(RegionKind.POINT, (complex(z),))

    @classmethod
    def segment(cls, a, b):
        return cls(RegionKind.SEGMENT, (complex(a), complex(b)))

    @classmethod
    def polygon(cls, vertices):
        return cls(RegionKind.POLYGON, tuple(complex(v) for v in vertices))

    @property
    def is_empty(self):
        return self.kind == RegionKind.EMPTY

    def vertex_array(self):
        return np.array(self.vertices, dtype=np.complex128)

    @property
    def diameter(self):
        v = self.vertex_array()
        if len(v) < 2:
            return 0.0
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    @property
    def area(self):
        if self.kind != RegionKind.POLYGON:
            return 0.0
        return signed_area(self.vertex_array())

    def to_shapely(self):
        if self.is_empty:
            raise EmptyRegion("empty region has no geometry")
        coords = [(z.real, z.imag) for z in self.vertices]
        if self.kind == RegionKind.POINT:
            return shapely.Point(coords[0])
        if self.kind == RegionKind.SEGMENT:
            return shapely.LineString(coords)
        return shapely.Polygon(coords)

    def distance_to(self, z):
        return float(self.to_shapely().distance(shapely.Point(z.real, z.imag)))

    def contains(self, z, tol=1e-9):
        if self.is_empty:
            return False
        return self.distance_to(complex(z)) <= tol

    def contains_region(self, other, tol=1e-9):
        if other.is_empty:
            return True
        return all(self.contains(v, tol) for v in other.vertices)

    def transformed(self, alpha, beta=0.0):
        """Image of the region under ``z -> alpha z + beta``."""
        if self.is_empty:
            return self
        if alpha == 0:
            return ConvexRegion.point(beta)
        image = [alpha * v + beta for v in self.vertices]
        if self.kind == RegionKind.POLYGON:
            return ConvexRegion.polygon(_canonical_cycle(np.array(image)))
        return ConvexRegion(self.kind, tuple(complex(v) for v in image))


@dataclass(frozen=True)
class ChebyshevResult:
    center: complex
    radius: float
    active_constraints: tuple = field(default_factory=tuple)


def signed_area(vertices):
    x, y = np.real(vertices), np.imag(vertices)
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def max_angular_gap(planes):
    angles = np.sort(np.unique([p.angle for p in planes]))
    if len(angles) == 0:
        return TWO_PI
    gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
    return float(np.max(gaps))


def encloses_bounded_region(planes):
    """True when the outward normals positively span the plane."""
    return max_angular_gap(planes) < math.pi - 1e-12


def _lp_rows(planes):
    a = np.array([p.coefficients for p in planes])
    b = np.array([p.offset for p in planes])
    return a, b


def chebyshev_center(planes, settings=None):
    """Largest disk inside the family; a negative radius certifies emptiness.

    Solves ``max r`` subject to ``2 (x cos t_j - y sin t_j) + 2 r <= h_j`` as a
    three-variable linear program with ``r`` free.
    """
    settings = settings or get_settings()
    planes = list(planes)
    if not planes:
        raise Unbounded("no half-planes given")
    a, b = _lp_rows(planes)
    a_ub = np.hstack([a, np.full((len(planes), 1), 2.0)])
    result = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=b,
        bounds=[(None, None)] * 3,
        method="highs",
        options=HIGHS_OPTIONS,
    )
    if result.status == 3:
        raise Unbounded("half-plane family contains arbitrarily large disks")
    if not result.success:
        raise Unbounded(f"Chebyshev linear program failed: {result.message}")

    x, y, radius = result.x
    if radius >= -settings.geometry_tol and not encloses_bounded_region(planes):
        raise Unbounded("half-plane normals do not span the plane")

    marginals = getattr(getattr(result, "ineqlin", None), "marginals", None)
    if marginals is not None:
        weights = np.abs(np.asarray(marginals))
        active = [int(i) for i in np.argsort(-weights) if weights[i] > 1e-12]
    else:
        slack = b - a_ub @ result.x
        active = [int(i) for i in np.flatnonzero(slack <= settings.geometry_tol)]
    return ChebyshevResult(
        center=complex(x, y), radius=float(radius), active_constraints=tuple(active)
    )


def infeasible_core(planes, settings=None):
    """Indices of at most three planes whose intersection is already empty.

    Returns ``None`` when the family is not infeasible. The optimum of the
    Chebyshev program is fixed by its basic constraints, so the constraints
    with non-zero dual weight are tried first, then small combinations.
    """
    settings = settings or get_settings()
    planes = list(planes)
    tol = settings.geometry_tol
    try:
        full = chebyshev_center(planes, settings)
    except Unbounded:
        return None
    if full.radius >= -tol:
        return None

    def infeasible(indices):
        try:
            return chebyshev_center([planes[i] for i in indices], settings).radius < -tol
        except Unbounded:
            return False

    active = list(full.active_constraints)
    if 0 < len(active) <= 3 and infeasible(active):
        return tuple(sorted(active))

    a, b = _lp_rows(planes)
    center = np.array([full.center.real, full.center.imag])
    by_violation = list(np.argsort(b - a @ center))
    candidates = list(dict.fromkeys(active[:8] + [int(i) for i in by_violation[:8]]))
    for size in (2, 3):
        for combo in itertools.combinations(candidates, size):
            if infeasible(combo):
                return tuple(sorted(combo))
    logger.warning("could not shrink infeasible family to three planes")
    return None


def _canonical_cycle(vertices):
    """Counterclockwise order starting at the lowest, then leftmost, vertex."""
    v = np.asarray(vertices, dtype=np.complex128)
    if signed_area(v) < 0:
        v = v[::-1]
    start = min(range(len(v)), key=lambda i: (round(v[i].imag, 12), v[i].real))
    return np.roll(v, -start)


def _strictly_convex(vertices, eps):
    """Drop repeated and collinear vertices from a counterclockwise cycle."""
    v = list(vertices)
    changed = True
    while changed and len(v) >= 3:
        changed = False
        for i in range(len(v)):
            prev, cur, nxt = v[i - 1], v[i], v[(i + 1) % len(v)]
            chord = abs(nxt - prev)
            cross = ((cur - prev).conjugate() * (nxt - cur)).imag
            if abs(cur - prev) <= eps or chord <= eps or abs(cross) <= eps * chord:
                del v[i]
                changed = True
                break
    return v


def _extreme_point(a, b, direction):
    result = linprog(
        c=-np.asarray(direction, dtype=float),
        A_ub=a,
        b_ub=b,
        bounds=[(None, None)] * 2,
        method="highs",
        options=HIGHS_OPTIONS,
    )
    if not result.success:
        raise Unbounded(f"support linear program failed: {result.message}")
    return complex(result.x[0], result.x[1])


def _degenerate_region(planes, radius, tol):
    """Point or segment for families whose inscribed disk is within ``tol`` of zero.

    A slightly negative ``radius`` is absorbed by shifting every offset by
    ``2|radius|``, the smallest shift that makes the family feasible.
    """
    a, b = _lp_rows(planes)
    scale = max(1.0, float(np.max(np.abs(b))))
    for slack in (1e-12, 1e-11, 1e-10):
        relaxed = b + 2.0 * max(0.0, -radius) + slack * scale
        try:
            extremes = [_extreme_point(a, relaxed, d) for d in ((1, 0), (-1, 0), (0, 1), (0, -1))]
            break
        except Unbounded:
            logger.debug("degenerate family infeasible at slack %.0e", slack)
    else:
        raise Unbounded("degenerate half-plane family has no feasible point")
    p, q = max(itertools.combinations(extremes, 2), key=lambda pq: abs(pq[0] - pq[1]))
    if abs(p - q) < tol:
        return ConvexRegion.point(0.5 * (p + q))
    u = (q - p) / abs(q - p)
    start = _extreme_point(a, relaxed, (-u.real, -u.imag))
    end = _extreme_point(a, relaxed, (u.real, u.imag))
    if abs(end - start) < tol:
        return ConvexRegion.point(0.5 * (start + end))
    return ConvexRegion.segment(start, end)


def intersect_halfplanes(planes, settings=None):
    """Exact intersection of a finite half-plane family, classified by kind."""
    settings = settings or get_settings()
    planes = list(planes)
    tol = settings.geometry_tol
    cheb = chebyshev_center(planes, settings)
    if cheb.radius < -tol:
        return ConvexRegion.empty()
    if cheb.radius <= tol:
        return _degenerate_region(planes, cheb.radius, tol)

    a, b = _lp_rows(planes)
    interior = np.array([cheb.center.real, cheb.center.imag])
    hs = HalfspaceIntersection(np.hstack([a, -b[:, None]]), interior)
    points = np.unique(np.round(hs.intersections, 14), axis=0)
    hull = ConvexHull(points)
    cycle = points[hull.vertices, 0] + 1j * points[hull.vertices, 1]
    scale = max(1.0, float(np.max(np.abs(cycle))))
    cycle = _strictly_convex(_canonical_cycle(cycle), 1e-12 * scale)
    if len(cycle) < 3:
        return _degenerate_region(planes, cheb.radius, tol)
    return ConvexRegion.polygon(_canonical_cycle(cycle))


def hausdorff_distance(first, second):
    """Hausdorff distance of two non-empty convex sets via vertex-to-set distances."""
    if first.is_empty or second.is_empty:
        raise EmptyRegion("Hausdorff distance needs two non-empty regions")
    first_shape, second_shape = first.to_shapely(), second.to_shapely()
    forward = max(second_shape.distance(shapely.Point(z.real, z.imag)) for z in first.vertices)
    backward = max(first_shape.distance(shapely.Point(z.real, z.imag)) for z in second.vertices)
    return float(max(forward, backward))
