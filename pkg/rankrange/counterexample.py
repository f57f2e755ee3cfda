"""Matrices whose rank-k numerical range is empty once ``k >= n/3 + 1``."""

import logging
from dataclasses import dataclass

import numpy as np

from .conf import get_settings
from .engine import RankRangeQuery, empty_certificate, support_value
from .exceptions import DimensionMismatch, EmptinessLost, ThresholdViolated
from .geometry import HalfPlane, chebyshev_center
from .linalg import as_matrix
from .witness import HELLY_ANGLES

logger = logging.getLogger(__name__)

W = np.exp(2j * np.pi / 3)


@dataclass(frozen=True)
class CounterexampleSpec:
    n: int
    k: int
    perturbation: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.k <= self.n:
            raise DimensionMismatch(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if 3 * self.k < self.n + 3:
            raise ThresholdViolated(
                f"k={self.k} is below n/3 + 1 for n={self.n} (3k={3 * self.k} < n+3={self.n + 3})"
            )
        if self.perturbation < 0:
            raise ValueError("perturbation must be non-negative")


def build_counterexample(spec):
    """``I_{k-1} + w I_{k-1} + w^2 I_{k-1}`` (direct sum), cut to its leading ``n x n`` block."""
    block = spec.k - 1
    diagonal = np.concatenate([np.ones(block), np.full(block, W), np.full(block, W**2)])
    return np.diag(diagonal[: spec.n]).astype(np.complex128)


def strictly_upper_direction(n, seed):
    """Seeded strictly upper triangular matrix with largest entry of modulus one."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    upper = np.triu(g, k=1)
    peak = np.max(np.abs(upper)) if n > 1 else 0.0
    return upper / peak if peak > 0 else upper


def _stays_empty(matrix, k, settings):
    return empty_certificate(RankRangeQuery(matrix, k), settings) is not None


def largest_preserving_epsilon(matrix, k, epsilon_max, seed, iterations=20, settings=None):
    """Bisection for the largest tested epsilon whose perturbation stays provably empty."""
    settings = settings or get_settings()
    a = as_matrix(matrix)
    direction = strictly_upper_direction(a.shape[0], seed)
    if not _stays_empty(a, k, settings):
        return 0.0
    low, high = 0.0, float(epsilon_max)
    for _ in range(iterations):
        middle = 0.5 * (low + high)
        if _stays_empty(a + middle * direction, k, settings):
            low = middle
        else:
            high = middle
    return low


def perturb_nonnormal(matrix, k, epsilon, seed=0, settings=None):
    """``A + epsilon N`` with ``N`` strictly upper triangular, checked to stay empty."""
    settings = settings or get_settings()
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    a = as_matrix(matrix)
    if epsilon == 0:
        return a
    perturbed = a + epsilon * strictly_upper_direction(a.shape[0], seed)
    if _stays_empty(perturbed, k, settings):
        return perturbed
    safe = largest_preserving_epsilon(a, k, epsilon, seed, settings=settings)
    logger.warning("perturbation %.3g loses emptiness; largest safe %.3g", epsilon, safe)
    raise EmptinessLost(f"epsilon={epsilon:g} does not keep the range empty", safe)


def rotation_certificate(matrix, k, settings=None):
    """Chebyshev disk of the three support half-planes at 0, 2pi/3 and 4pi/3.

    For the direct-sum construction with ``3k = n + 3`` these are the lines
    ``Re z = -1/2`` rotated by the cube roots of unity, whose intersection is
    empty, so the returned radius is negative.
    """
    planes = [HalfPlane(t, support_value(matrix, k, t)) for t in HELLY_ANGLES]
    return chebyshev_center(planes, settings)
