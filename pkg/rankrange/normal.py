"""Exact rank-k numerical range of normal matrices.

For a normal matrix with eigenvalues ``l_1, ..., l_n`` the range is the
intersection, over all index sets of size ``n - k + 1``, of the convex hulls of
the selected eigenvalues. Each hull is turned into its supporting half-planes
and the whole family is intersected by :mod:`rankrange.geometry`.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.spatial import ConvexHull

from .conf import get_settings
from .exceptions import CombinatorialLimit, DimensionMismatch
from .geometry import ConvexRegion, HalfPlane, intersect_halfplanes
from .linalg import adjoint, as_matrix, inf_norm


@dataclass(frozen=True)
class NormalSpectrum:
    eigenvalues: tuple

    def __post_init__(self):
        values = tuple(complex(v) for v in self.eigenvalues)
        if not values:
            raise DimensionMismatch("a spectrum needs at least one eigenvalue")
        object.__setattr__(self, "eigenvalues", values)

    @property
    def n(self):
        return len(self.eigenvalues)

    @classmethod
    def of(cls, matrix):
        return cls(tuple(sla.eigvals(as_matrix(matrix))))


def is_normal(matrix, tol=None, settings=None):
    settings = settings or get_settings()
    tol = settings.normal_tol if tol is None else tol
    a = as_matrix(matrix)
    commutator = a @ adjoint(a) - adjoint(a) @ a
    return inf_norm(commutator) <= tol * inf_norm(a) ** 2


def _plane_along(direction, points):
    """Supporting half-plane with outward unit normal ``direction``."""
    angle = -np.angle(direction)
    offset = float(np.max(2.0 * np.real(np.exp(1j * angle) * points)))
    return HalfPlane(angle, offset)


def hull_halfplanes(points, eps=1e-12):
    """Half-planes whose intersection is exactly ``conv(points)``.

    Coincident points give three planes meeting in the point, collinear points
    two opposing planes along the line plus two end caps.
    """
    z = np.asarray(points, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(z))))
    centered = z - np.mean(z)
    if float(np.max(np.abs(centered))) <= eps * scale:
        directions = np.exp(-1j * np.array([0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0]))
        return [_plane_along(d, z) for d in directions]

    coords = np.column_stack([z.real, z.imag])
    singular = np.linalg.svd(coords - coords.mean(axis=0), compute_uv=False)
    if len(z) < 3 or singular[-1] <= eps * scale:
        far = centered[np.argmax(np.abs(centered))]
        u = far / abs(far)
        return [_plane_along(d, z) for d in (u, -u, 1j * u, -1j * u)]

    hull = ConvexHull(coords)
    cycle = z[hull.vertices]
    edges = np.roll(cycle, -1) - cycle
    return [_plane_along(-1j * e / abs(e), z) for e in edges]


def normal_exact_region(spectrum, k, settings=None):
    settings = settings or get_settings()
    n = spectrum.n
    if not 1 <= k <= n:
        raise DimensionMismatch(f"k={k} must lie in 1..{n}")
    size = n - k + 1
    count = math.comb(n, size)
    if count > settings.combinatorial_limit:
        raise CombinatorialLimit(f"{count} eigenvalue subsets exceed the limit")

    values = np.array(spectrum.eigenvalues)
    planes = []
    for subset in itertools.combinations(range(n), size):
        planes.extend(hull_halfplanes(values[list(subset)]))
    return intersect_halfplanes(planes, settings)


def hermitian_rank_interval(eigenvalues, k, tol=1e-12):
    """``[l_{n-k+1}, l_k]`` of the descending real eigenvalues, as a region."""
    values = np.sort(np.real(np.asarray(eigenvalues)))[::-1]
    n = len(values)
    if not 1 <= k <= n:
        raise DimensionMismatch(f"k={k} must lie in 1..{n}")
    low, high = float(values[n - k]), float(values[k - 1])
    if low > high + tol:
        return ConvexRegion.empty()
    if abs(high - low) <= tol:
        return ConvexRegion.point(0.5 * (low + high))
    return ConvexRegion.segment(low, high)
