"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` complex arrays. The helpers here validate them,
build the rotated Hermitian parts ``A(t) = e^{it}A + e^{-it}A^*`` and handle
Hermitian eigendecompositions and orthonormal subspaces.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.stats import unitary_group

from .conf import get_settings
from .exceptions import DimensionMismatch, NoConvergence, NonFinite, NotHermitian

logger = logging.getLogger(__name__)


def as_matrix(data, square=True):
    """Return ``data`` as a finite 2-D complex128 array (a copy)."""
    matrix = np.array(data, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got {matrix.shape}")
    if square and matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise NonFinite("matrix has NaN or infinite entries")
    return matrix


def adjoint(matrix):
    return np.conj(matrix).T


def inf_norm(matrix):
    return float(np.linalg.norm(matrix, np.inf))


def max_abs(matrix):
    return float(np.max(np.abs(matrix))) if np.size(matrix) else 0.0


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues in descending order with matching orthonormal eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self):
        return len(self.values)

    def lower_eigenspace(self, k):
        """Span of the eigenvectors for ``values[k-1:]``, i.e. lambda_k, ..., lambda_n."""
        return Subspace(self.vectors[:, k - 1 :])


def hermitian_eig(matrix, settings=None):
    settings = settings or get_settings()
    h = as_matrix(matrix)
    scale = inf_norm(h)
    if inf_norm(h - adjoint(h)) > settings.hermitian_tol * max(scale, 1.0):
        raise NotHermitian("matrix is not Hermitian within tolerance")

    off_diagonal = h - np.diag(np.diag(h))
    if not np.any(off_diagonal):
        # Diagonal input: exact eigenvalues, stable descending order.
        diagonal = np.real(np.diag(h))
        order = np.argsort(-diagonal, kind="stable")
        vectors = np.eye(h.shape[0], dtype=np.complex128)[:, order]
        return HermitianEig(values=diagonal[order], vectors=vectors)

    symmetric = 0.5 * (h + adjoint(h))
    values, vectors = np.linalg.eigh(symmetric)
    residual = float(np.max(np.linalg.norm(symmetric @ vectors - vectors * values, axis=0)))
    if residual > settings.eig_tol * max(scale, 1.0):
        raise NoConvergence("Hermitian eigendecomposition is inaccurate", residual)
    return HermitianEig(values=values[::-1].copy(), vectors=vectors[:, ::-1].copy())


def eigvalsh_descending(stack):
    """Descending eigenvalues of one Hermitian matrix or a stack of them."""
    return np.linalg.eigvalsh(stack)[..., ::-1]


def hermitian_part_at(matrix, t):
    a = as_matrix(matrix)
    rotated = np.exp(1j * t) * a
    rotated = rotated + adjoint(rotated)
    return 0.5 * (rotated + adjoint(rotated))


def hermitian_parts_at(matrix, angles):
    """Stack of ``A(t)`` for every angle, shape ``(m, n, n)``."""
    a = as_matrix(matrix)
    phases = np.exp(1j * np.asarray(angles, dtype=float))[:, None, None]
    rotated = phases * a[None, :, :]
    rotated = rotated + np.conj(np.swapaxes(rotated, 1, 2))
    return 0.5 * (rotated + np.conj(np.swapaxes(rotated, 1, 2)))


def hermitian_part_split(matrix):
    """Return ``(H, G)`` with ``A = H + iG`` and both Hermitian."""
    a = as_matrix(matrix)
    return 0.5 * (a + adjoint(a)), (a - adjoint(a)) / 2j


def is_unitary(matrix, tol=1e-12):
    u = np.asarray(matrix)
    return max_abs(adjoint(u) @ u - np.eye(u.shape[1])) <= tol


def random_unitary(n, rng):
    return unitary_group.rvs(n, random_state=rng)


def random_gaussian_matrix(n, rng):
    """Matrix with i.i.d. standard complex Gaussian entries."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_hermitian(n, rng):
    g = random_gaussian_matrix(n, rng)
    return 0.5 * (g + adjoint(g))


def orthonormalize(columns):
    """Orthonormal basis of the column span (economic QR)."""
    q, _ = sla.qr(np.asarray(columns, dtype=np.complex128), mode="economic")
    return q


def polar_retraction(columns):
    """Closest isometry to ``columns`` in Frobenius norm."""
    u, _, vh = sla.svd(np.asarray(columns, dtype=np.complex128), full_matrices=False)
    return u @ vh


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^n given by an ``n x d`` matrix with orthonormal columns."""

    basis: np.ndarray

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ adjoint(self.basis)

    def residual(self, vector):
        """Norm of the component of ``vector`` orthogonal to the subspace."""
        v = np.asarray(vector)
        return float(np.linalg.norm(v - self.basis @ (adjoint(self.basis) @ v)))


def intersection_dimension_bound(dims, n):
    """Lower bound sum(dim V_j) - (m-1) n on the dimension of an intersection."""
    return max(0, sum(dims) - (len(dims) - 1) * n)


def subspace_intersection(subspaces, tol=None, settings=None):
    settings = settings or get_settings()
    tol = settings.subspace_tol if tol is None else tol
    subspaces = list(subspaces)
    if not subspaces:
        raise DimensionMismatch("need at least one subspace")
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise DimensionMismatch("subspaces live in different ambient spaces")
    if any(s.dim == 0 for s in subspaces):
        return Subspace(np.zeros((n, 0), dtype=np.complex128))

    identity = np.eye(n, dtype=np.complex128)
    constraints = np.vstack([identity - s.projector() for s in subspaces])
    _, singular_values, vh = sla.svd(constraints, full_matrices=True)
    padded = np.zeros(n)
    padded[: len(singular_values)] = singular_values
    null_rows = vh[padded <= tol]
    basis = adjoint(null_rows)
    logger.debug(
        "intersection of %d subspaces in C^%d has dimension %d",
        len(subspaces),
        n,
        basis.shape[1],
    )
    return Subspace(basis)
