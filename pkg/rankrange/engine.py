"""Rank-k numerical range through its half-plane characterization.

``mu`` lies in the rank-k numerical range of ``A`` iff for every angle ``t``::

    2 Re(e^{it} mu) <= lambda_k(e^{it} A + e^{-it} A^*)

Sampling finitely many angles gives an outer approximation of the region, so
``Outside`` verdicts and emptiness certificates are exact while non-emptiness
is only claimed once an isometry witness has been verified.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .conf import get_settings
from .exceptions import DimensionMismatch, EmptyIntersection, SynthesisFailed
from .geometry import (
    ChebyshevResult,
    ConvexRegion,
    RegionKind,
    chebyshev_center,
    halfplanes,
    infeasible_core,
    intersect_halfplanes,
)
from .linalg import as_matrix, eigvalsh_descending, hermitian_part_at, hermitian_parts_at
from .witness import (
    HELLY_ANGLES,
    Isometry,
    helly_witness,
    synthesize_any_isometry,
    synthesize_isometry,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankRangeQuery:
    matrix: np.ndarray
    k: int
    grid_size: int = None
    tolerance: float = None

    def __post_init__(self):
        a = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", a)
        settings = get_settings()
        if self.grid_size is None:
            object.__setattr__(self, "grid_size", settings.grid_size)
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", settings.geometry_tol)
        if not 1 <= self.k <= self.n:
            raise DimensionMismatch(f"k={self.k} must lie in 1..{self.n}")
        if self.grid_size < 8:
            raise DimensionMismatch(f"grid_size={self.grid_size} must be at least 8")

    @property
    def n(self):
        return self.matrix.shape[0]

    def angles(self):
        return grid_angles(self.grid_size)


@dataclass(frozen=True)
class EmptyCertificate:
    angles: tuple
    offsets: tuple
    radius: float

    kind = "empty"

    def planes(self):
        return halfplanes(self.angles, self.offsets)


@dataclass(frozen=True)
class NonEmptyWitness:
    mu: complex
    isometry: Isometry

    kind = "witness"


@dataclass(frozen=True)
class Approximate:
    kind = "approximate"


@dataclass(frozen=True)
class RankRangeResult:
    region: ConvexRegion
    certificate: object
    planes: tuple = field(default_factory=tuple)
    chebyshev: ChebyshevResult = None


class Membership(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class MembershipResult:
    verdict: Membership
    min_slack: float
    angle: float

    @property
    def violating_angle(self):
        return self.angle if self.verdict == Membership.OUTSIDE else None


class Emptiness(str, Enum):
    PROVABLY_EMPTY = "provably_empty"
    PROVABLY_NONEMPTY = "provably_nonempty"
    UNDECIDED = "undecided"


class Threshold(str, Enum):
    GUARANTEED_NONEMPTY = "guaranteed_nonempty"
    POSSIBLY_EMPTY = "possibly_empty"


@dataclass(frozen=True)
class EmptinessResult:
    verdict: Emptiness
    certificate: object
    threshold: Threshold
    region: ConvexRegion


def grid_angles(m):
    return 2.0 * math.pi * np.arange(m) / m


def _check_k(a, k):
    if not 1 <= k <= a.shape[0]:
        raise DimensionMismatch(f"k={k} must lie in 1..{a.shape[0]}")


def support_value(matrix, k, t):
    """``lambda_k(A(t))``, the k-th largest eigenvalue of the rotated Hermitian part."""
    a = as_matrix(matrix)
    _check_k(a, k)
    return float(eigvalsh_descending(hermitian_part_at(a, t))[k - 1])


def support_values(matrix, k, angles):
    """:func:`support_value` for a whole array of angles in one batched call."""
    a = as_matrix(matrix)
    _check_k(a, k)
    angles = np.asarray(angles, dtype=float)
    return eigvalsh_descending(hermitian_parts_at(a, angles))[:, k - 1]


def _slack(a, k, mu, t):
    return support_value(a, k, t) - 2.0 * np.real(np.exp(1j * t) * mu)


def membership(query, mu, settings=None):
    settings = settings or get_settings()
    mu = complex(mu)
    a, k = query.matrix, query.k
    angles = query.angles()
    slacks = support_values(a, k, angles) - 2.0 * np.real(np.exp(1j * angles) * mu)
    index = int(np.argmin(slacks))
    angle, lowest = float(angles[index]), float(slacks[index])

    if settings.refine:
        step = 2.0 * math.pi / query.grid_size
        refined = minimize_scalar(
            lambda t: _slack(a, k, mu, t),
            bounds=(angle - step, angle + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if refined.fun < lowest:
            angle, lowest = float(refined.x) % (2.0 * math.pi), float(refined.fun)

    if lowest < -query.tolerance:
        verdict = Membership.OUTSIDE
    elif lowest <= query.tolerance:
        verdict = Membership.BOUNDARY
    else:
        verdict = Membership.INSIDE
    return MembershipResult(verdict=verdict, min_slack=lowest, angle=angle)


def _planes(matrix, k, angles):
    return halfplanes(angles, support_values(matrix, k, angles))


def outer_planes(query, settings=None):
    """Sampled supporting half-planes, refined once around the tight constraints.

    The refinement only adds midpoints of the uniform grid, so a grid of size
    ``m`` never produces a smaller region than the plain grid of size ``2m``.
    """
    settings = settings or get_settings()
    angles = query.angles()
    planes = _planes(query.matrix, query.k, angles)
    if not settings.refine:
        return planes
    cheb = chebyshev_center(planes, settings)
    half_step = math.pi / query.grid_size
    extra = set()
    for index in cheb.active_constraints:
        extra.add(float(angles[index] - half_step) % (2.0 * math.pi))
        extra.add(float(angles[index] + half_step) % (2.0 * math.pi))
    if extra:
        planes = planes + _planes(query.matrix, query.k, np.array(sorted(extra)))
    return planes


def _empty_certificate(planes, settings):
    core = infeasible_core(planes, settings)
    if core is None:
        return None
    chosen = [planes[i] for i in core]
    radius = chebyshev_center(chosen, settings).radius
    return EmptyCertificate(
        angles=tuple(p.angle for p in chosen),
        offsets=tuple(p.offset for p in chosen),
        radius=radius,
    )


def empty_certificate(query, settings=None):
    """At most three sampled half-planes with empty intersection, or ``None``."""
    settings = settings or get_settings()
    return _empty_certificate(outer_planes(query, settings), settings)


def _query_settings(query, settings):
    settings = settings or get_settings()
    if query.tolerance != settings.geometry_tol:
        settings = settings.with_overrides(geometry_tol=query.tolerance)
    return settings


def boundary_region(query, settings=None, attach_witness=True):
    """Outer polygonal approximation of the range with a certificate."""
    settings = _query_settings(query, settings)
    planes = outer_planes(query, settings)
    region = intersect_halfplanes(planes, settings)

    if region.is_empty:
        certificate = _empty_certificate(planes, settings)
        if certificate is None:
            logger.warning("empty outer region without a three-plane certificate")
            certificate = Approximate()
        else:
            logger.info("empty rank-%d range, certificate angles %s", query.k, certificate.angles)
        return RankRangeResult(region, certificate, tuple(planes))

    cheb = chebyshev_center(planes, settings)
    if not attach_witness:
        return RankRangeResult(region, Approximate(), tuple(planes), cheb)

    target = region.vertices[0] if region.kind == RegionKind.POINT else cheb.center
    on_boundary = region.kind in (RegionKind.POINT, RegionKind.SEGMENT)
    try:
        isometry = synthesize_isometry(
            query.matrix, query.k, target, on_boundary=on_boundary, settings=settings
        )
    except SynthesisFailed as exc:
        logger.warning("no witness at %s: %s", target, exc)
        return RankRangeResult(region, Approximate(), tuple(planes), cheb)
    logger.info("%s rank-%d range with witness at %s", region.kind.value, query.k, target)
    return RankRangeResult(region, NonEmptyWitness(complex(target), isometry), tuple(planes), cheb)


def nonemptiness_threshold(n, k):
    """Non-emptiness is guaranteed exactly when ``k < n/3 + 1``, i.e. ``3(k-1) < n``."""
    if not 1 <= k <= n:
        raise DimensionMismatch(f"k={k} must lie in 1..{n}")
    if 3 * (k - 1) < n:
        return Threshold.GUARANTEED_NONEMPTY
    return Threshold.POSSIBLY_EMPTY


def emptiness_check(query, settings=None):
    settings = _query_settings(query, settings)
    threshold = nonemptiness_threshold(query.n, query.k)
    result = boundary_region(query, settings)

    if isinstance(result.certificate, EmptyCertificate):
        if threshold == Threshold.GUARANTEED_NONEMPTY:
            logger.error("emptiness certificate below the non-emptiness threshold")
        return EmptinessResult(Emptiness.PROVABLY_EMPTY, result.certificate, threshold, result.region)
    if isinstance(result.certificate, NonEmptyWitness):
        return EmptinessResult(
            Emptiness.PROVABLY_NONEMPTY, result.certificate, threshold, result.region
        )
    if result.region.is_empty:
        return EmptinessResult(Emptiness.UNDECIDED, result.certificate, threshold, result.region)

    if query.k == 1:
        # a unit vector v is already a rank-one witness for v^* A v
        try:
            found = helly_witness(query.matrix, 1, *HELLY_ANGLES, settings=settings)
        except EmptyIntersection:
            found = None
        if found is not None:
            witness = NonEmptyWitness(found.mu, Isometry(found.vector[:, None]))
            return EmptinessResult(Emptiness.PROVABLY_NONEMPTY, witness, threshold, result.region)

    try:
        found = synthesize_any_isometry(query.matrix, query.k, settings=settings)
    except SynthesisFailed as exc:
        logger.warning("emptiness undecided for k=%d: %s", query.k, exc)
        return EmptinessResult(Emptiness.UNDECIDED, Approximate(), threshold, result.region)
    if not result.region.contains(found.value, tol=1e-6):
        logger.warning("witness value %s lies outside the outer region", found.value)
    witness = NonEmptyWitness(found.value, found.isometry)
    return EmptinessResult(Emptiness.PROVABLY_NONEMPTY, witness, threshold, result.region)
