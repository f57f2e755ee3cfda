"""Constructive side: isometry witnesses for points of the rank-k numerical range.

``lambda`` belongs to the rank-k numerical range of ``A`` exactly when some
``n x k`` isometry ``X`` compresses ``A`` to ``lambda I_k``. Everything that
claims non-emptiness goes through :func:`verify_compression`.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .conf import get_settings
from .exceptions import (
    DimensionMismatch,
    EmptyIntersection,
    InvalidAngles,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    SynthesisFailed,
    ThresholdViolated,
)
from .linalg import (
    adjoint,
    as_matrix,
    hermitian_eig,
    hermitian_part_at,
    intersection_dimension_bound,
    is_unitary,
    max_abs,
    polar_retraction,
    subspace_intersection,
)

logger = logging.getLogger(__name__)

HELLY_ANGLES = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)


@dataclass(frozen=True)
class Isometry:
    """``n x k`` matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.matrix, dtype=np.complex128)
        if x.ndim != 2 or x.shape[1] > x.shape[0] or x.shape[1] == 0:
            raise DimensionMismatch(f"not an n x k isometry shape: {x.shape}")
        if max_abs(adjoint(x) @ x - np.eye(x.shape[1])) > 1e-10:
            raise DimensionMismatch("columns are not orthonormal")
        object.__setattr__(self, "matrix", x)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def k(self):
        return self.matrix.shape[1]

    def transformed(self, unitary):
        """The isometry ``U^* X`` that witnesses the same point for ``U^* A U``."""
        if not is_unitary(unitary, tol=1e-10):
            raise DimensionMismatch("transformation is not unitary")
        return Isometry(adjoint(unitary) @ self.matrix)


def compression(matrix, isometry):
    x = isometry.matrix if isinstance(isometry, Isometry) else np.asarray(isometry)
    return adjoint(x) @ np.asarray(matrix) @ x


def compression_residual(matrix, isometry, lam):
    c = compression(matrix, isometry)
    return max_abs(c - lam * np.eye(c.shape[0]))


def verify_compression(matrix, isometry, lam, tol=None, settings=None):
    """Ground-truth acceptor: ``X^* A X = lambda I_k`` and ``X^* X = I_k``."""
    settings = settings or get_settings()
    tol = settings.compression_tol if tol is None else tol
    a = np.asarray(matrix)
    x = isometry.matrix if isinstance(isometry, Isometry) else np.asarray(isometry)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or x.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"matrix {a.shape} and isometry {x.shape} do not fit")
    if max_abs(adjoint(x) @ x - np.eye(x.shape[1])) > settings.isometry_tol:
        return False
    return compression_residual(a, x, lam) <= tol


# Riccati equation -----------------------------------------------------------


@dataclass(frozen=True)
class RiccatiProblem:
    """Data ``(M, P)`` of ``I + MH + HM^* - HPH = H`` with ``P`` positive definite."""

    M: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.M)
        p = as_matrix(self.P)
        if m.shape != p.shape:
            raise DimensionMismatch(f"M is {m.shape} but P is {p.shape}")
        if max_abs(p - adjoint(p)) > 1e-12 * max(1.0, max_abs(p)):
            raise NotHermitian("P must be Hermitian")
        if np.linalg.eigvalsh(0.5 * (p + adjoint(p)))[0] <= 0:
            raise NotPositiveDefinite("P must be positive definite")
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "P", 0.5 * (p + adjoint(p)))

    @property
    def k(self):
        return self.M.shape[0]

    @property
    def shifted(self):
        """``M - I/2``, the linear coefficient of the continuous Riccati form."""
        return self.M - 0.5 * np.eye(self.k)


def riccati_residual(h, problem):
    """``HPH - H(M^* - I/2) - (M - I/2)H - I``."""
    b = problem.shifted
    return h @ problem.P @ h - h @ adjoint(b) - b @ h - np.eye(problem.k)


def riccati_eq1_residual(h, problem):
    """``H - (I + MH + HM^* - HPH)``; identical to :func:`riccati_residual`."""
    m = problem.M
    return h - (np.eye(problem.k) + m @ h + h @ adjoint(m) - h @ problem.P @ h)


def _newton_riccati(problem, start, tol, max_iter):
    h = start
    best, best_residual = h, max_abs(riccati_residual(h, problem))
    for iteration in range(max_iter):
        residual = riccati_residual(h, problem)
        size = max_abs(residual)
        logger.debug("Riccati Newton iteration %d residual %.3e", iteration, size)
        if not np.isfinite(size):
            break
        if size < best_residual:
            best, best_residual = h, size
        if size <= tol:
            return h, size
        closed_loop = h @ problem.P - problem.shifted
        try:
            step = sla.solve_continuous_lyapunov(closed_loop, -residual)
        except (np.linalg.LinAlgError, ValueError):
            break
        h = h + step
        h = 0.5 * (h + adjoint(h))
    return best, best_residual


def riccati_solve(problem, settings=None):
    """Hermitian solution of the continuous Riccati equation.

    Newton's method started from ``H = I`` decides which solution is returned
    when several exist; if it stalls, the stabilizing solution from the
    Hamiltonian-pencil solver is polished with a few Newton steps instead.
    """
    settings = settings or get_settings()
    tol = settings.riccati_tol
    h, residual = _newton_riccati(
        problem, np.eye(problem.k, dtype=np.complex128), tol, settings.riccati_max_iter
    )
    if residual <= tol:
        return h

    logger.warning("Riccati Newton stalled at %.3e, using the CARE solver", residual)
    cholesky = sla.cholesky(problem.P, lower=True)
    try:
        care = sla.solve_continuous_are(
            adjoint(problem.shifted),
            cholesky,
            np.eye(problem.k),
            np.eye(problem.k),
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"Riccati solver failed: {exc}", residual) from exc
    h, residual = _newton_riccati(problem, 0.5 * (care + adjoint(care)), tol, 10)
    if residual > tol:
        raise NoConvergence("Riccati iteration stalled", residual)
    return h


def riccati_equivalence_check(h, problem, tol=1e-8):
    return max_abs(riccati_eq1_residual(np.asarray(h), problem)) <= tol


# Canonical block form -------------------------------------------------------


def canonical_block_matrix(x_block, y_block):
    """``[[I_k, X], [Y, -I_k]]``."""
    x = as_matrix(x_block)
    y = as_matrix(y_block)
    if x.shape != y.shape:
        raise DimensionMismatch(f"blocks differ in shape: {x.shape} vs {y.shape}")
    k = x.shape[0]
    identity = np.eye(k)
    return np.block([[identity, x], [y, -identity]])


def canonical_zero_witness(x_block, y_block, settings=None):
    """Isometry ``W`` with ``W^* A W = 0`` for ``A = [[I, X], [Y, -I]]``.

    A block-diagonal unitary from the SVD of ``(X - Y^*)/(2i)`` brings the
    blocks to ``X - Y^* = 2i Sigma``. The witness is then the graph of
    ``Z = i Sigma^{-1} H`` where ``H`` solves the Riccati equation with
    ``M = i C Sigma^{-1} + I/2`` and ``P = Sigma^{-2}``, ``C = (X + Y^*)/2``.
    With ``Sigma = 0`` the graph of ``Z = H`` for ``M = C + I/2, P = I`` works.
    """
    settings = settings or get_settings()
    a = canonical_block_matrix(x_block, y_block)
    x, y = as_matrix(x_block), as_matrix(y_block)
    k = x.shape[0]
    identity = np.eye(k)

    u1, sigma, u2h = sla.svd((x - adjoint(y)) / 2j)
    u2 = adjoint(u2h)
    x_t = adjoint(u1) @ x @ u2
    y_t = adjoint(u2) @ y @ u1
    c = 0.5 * (x_t + adjoint(y_t))

    scale = max(1.0, max_abs(a))
    floor = 1e-6 * scale
    if np.all(sigma <= 1e-12 * scale):
        h = riccati_solve(RiccatiProblem(c + 0.5 * identity, identity), settings)
        z = h
    else:
        # Partially singular Sigma is regularized here and polished below.
        sigma_reg = np.maximum(sigma, floor)
        inv = np.diag(1.0 / sigma_reg)
        problem = RiccatiProblem(1j * c @ inv + 0.5 * identity, inv @ inv)
        h = riccati_solve(problem, settings)
        z = 1j * inv @ h

    graph = np.vstack([identity, z])
    witness = sla.block_diag(u1, u2) @ polar_retraction(graph)
    if not verify_compression(a, witness, 0.0, settings=settings):
        logger.info("polishing canonical witness from residual %.3e",
                    compression_residual(a, witness, 0.0))
        witness, residual = _gauss_newton(
            a, witness, 0.0, settings.compression_tol, settings.synthesis_max_iter
        )
        if not verify_compression(a, witness, 0.0, settings=settings):
            raise SynthesisFailed("canonical block witness did not verify", residual)
    return Isometry(witness)


# Helly triple witness -------------------------------------------------------


@dataclass(frozen=True)
class HellyWitness:
    mu: complex
    vector: np.ndarray
    dimension: int
    angles: tuple
    slacks: tuple


def helly_witness(matrix, k, t1, t2, t3, settings=None):
    """Point of ``S(t1) & S(t2) & S(t3)`` from a common low eigenvector.

    ``V_j`` spans the eigenvectors of ``A(t_j)`` for ``lambda_k, ..., lambda_n``;
    any unit ``v`` in their intersection gives ``mu = v^* A v`` with
    ``2 Re(e^{it_j} mu) = v^* A(t_j) v <= lambda_k(A(t_j))``.
    """
    settings = settings or get_settings()
    a = as_matrix(matrix)
    n = a.shape[0]
    angles = (float(t1), float(t2), float(t3))
    if not 0.0 <= angles[0] < angles[1] < angles[2] < 2.0 * math.pi:
        raise InvalidAngles(f"angles must satisfy 0 <= t1 < t2 < t3 < 2 pi: {angles}")
    if not 3 * (k - 1) < n:
        raise ThresholdViolated(f"k={k} is not below n/3 + 1 for n={n}")

    spectra = [hermitian_eig(hermitian_part_at(a, t), settings) for t in angles]
    spaces = [eig.lower_eigenspace(k) for eig in spectra]
    common = subspace_intersection(spaces, settings=settings)
    bound = intersection_dimension_bound([s.dim for s in spaces], n)
    if common.dim == 0:
        raise EmptyIntersection("eigenspace intersection is numerically zero")
    if common.dim < bound:
        logger.warning("intersection dimension %d below the bound %d", common.dim, bound)

    v = common.basis[:, 0]
    mu = complex(np.vdot(v, a @ v))
    slacks = tuple(
        float(eig.values[k - 1] - 2.0 * np.real(np.exp(1j * t) * mu))
        for eig, t in zip(spectra, angles)
    )
    return HellyWitness(mu=mu, vector=v, dimension=common.dim, angles=angles, slacks=slacks)


# Isometry synthesis ---------------------------------------------------------


def _target(c, lam):
    k = c.shape[0]
    if lam is None:
        return c - (np.trace(c) / k) * np.eye(k)
    return c - lam * np.eye(k)


def compression_objective(matrix, x, lam=None):
    """``f(X) = ||X^* A X - lambda I||_F^2``; with ``lam=None`` the scalar is free."""
    r = _target(adjoint(x) @ matrix @ x, lam)
    return float(np.real(np.vdot(r, r)))


def compression_gradient(matrix, x, lam=None):
    """Euclidean gradient of :func:`compression_objective` for ``<U, V> = Re tr(U^* V)``."""
    r = _target(adjoint(x) @ matrix @ x, lam)
    return 2.0 * (matrix @ x @ adjoint(r) + adjoint(matrix) @ x @ r)


def tangent_projection(x, z):
    s = adjoint(x) @ z
    return z - x @ (0.5 * (s + adjoint(s)))


def _jacobian(matrix, x, free):
    """Real Jacobian of ``Delta -> (target, Herm(X^* Delta))`` at ``X``."""
    n, k = x.shape
    ax = matrix @ x
    ahx = adjoint(matrix) @ x
    columns = []
    for scalar in (1.0, 1j):
        for p in range(n):
            for q in range(k):
                d_target = np.zeros((k, k), dtype=np.complex128)
                d_target[q, :] += np.conj(scalar) * ax[p, :]
                d_target[:, q] += scalar * np.conj(ahx[p, :])
                if free:
                    d_target -= (np.trace(d_target) / k) * np.eye(k)
                d_iso = np.zeros((k, k), dtype=np.complex128)
                d_iso[:, q] += scalar * np.conj(x[p, :])
                d_iso[q, :] += np.conj(scalar) * x[p, :]
                d_iso *= 0.5
                columns.append(
                    np.concatenate(
                        [
                            d_target.real.ravel(),
                            d_target.imag.ravel(),
                            d_iso.real.ravel(),
                            d_iso.imag.ravel(),
                        ]
                    )
                )
    return np.array(columns).T


def _gauss_newton(matrix, x0, lam, tol, max_iter, patience=50):
    """Damped Gauss-Newton on isometries with polar retraction.

    Falls back to an Armijo Riemannian gradient step when the Gauss-Newton
    direction does not decrease the residual. Returns ``(X, residual)``.
    """
    free = lam is None
    n, k = x0.shape
    x = polar_retraction(x0)
    best_x, best = x, max_abs(_target(adjoint(x) @ matrix @ x, lam))
    stale = 0
    for iteration in range(max_iter):
        r = _target(adjoint(x) @ matrix @ x, lam)
        size = max_abs(r)
        if size <= tol:
            return x, size
        f_now = float(np.real(np.vdot(r, r)))

        jac = _jacobian(matrix, x, free)
        rhs = np.concatenate([-r.real.ravel(), -r.imag.ravel(), np.zeros(2 * k * k)])
        delta, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
        direction = (delta[: n * k] + 1j * delta[n * k :]).reshape(n, k)

        moved = False
        step = 1.0
        for _ in range(30):
            candidate = polar_retraction(x + step * direction)
            if compression_objective(matrix, candidate, lam) < f_now:
                x, moved = candidate, True
                break
            step *= 0.5
        if not moved:
            grad = tangent_projection(x, compression_gradient(matrix, x, lam))
            slope = float(np.real(np.vdot(grad, grad)))
            step = 1.0
            for _ in range(40):
                candidate = polar_retraction(x - step * grad)
                if compression_objective(matrix, candidate, lam) <= f_now - 1e-4 * step * slope:
                    x, moved = candidate, True
                    break
                step *= 0.5
        if not moved:
            break

        current = max_abs(_target(adjoint(x) @ matrix @ x, lam))
        if current < best * (1.0 - 1e-6):
            best_x, best, stale = x, current, 0
        else:
            stale += 1
            if stale >= patience:
                break
        logger.debug("synthesis iteration %d residual %.3e", iteration, current)
    return best_x, best


def _closest_eigenvector_start(matrix, k, lam, rng):
    values, vectors = sla.eig(matrix)
    reference = np.mean(values) if lam is None else lam
    order = np.argsort(np.abs(values - reference), kind="stable")
    columns = vectors[:, order[:k]]
    if np.linalg.matrix_rank(columns) < k:
        columns = columns + 1e-3 * _random_isometry(matrix.shape[0], k, rng)
    return polar_retraction(columns)


def _helly_start(matrix, k, rng, settings):
    n = matrix.shape[0]
    spaces = [
        hermitian_eig(hermitian_part_at(matrix, t), settings).lower_eigenspace(k)
        for t in HELLY_ANGLES
    ]
    common = subspace_intersection(spaces, settings=settings)
    columns = common.basis[:, :k]
    if columns.shape[1] < k:
        columns = np.hstack([columns, _random_isometry(n, k - columns.shape[1], rng)])
    return polar_retraction(columns)


def _random_isometry(n, k, rng):
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    return polar_retraction(g)


@dataclass(frozen=True)
class SynthesisResult:
    isometry: Isometry
    value: complex
    residual: float
    start_index: int


def _synthesize(matrix, k, lam, tol, settings, seed):
    a = as_matrix(matrix)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise DimensionMismatch(f"k={k} must lie in 1..{n}")
    rng = np.random.default_rng(seed)
    starts = [_closest_eigenvector_start(a, k, lam, rng), _helly_start(a, k, rng, settings)]
    starts += [_random_isometry(n, k, rng) for _ in range(settings.synthesis_starts)]

    def run(start):
        return _gauss_newton(a, start, lam, tol, settings.synthesis_max_iter)

    def accept(index, x, residual):
        c = adjoint(x) @ a @ x
        value = complex(np.trace(c) / k) if lam is None else complex(lam)
        if verify_compression(a, x, value, tol=tol, settings=settings):
            logger.info("witness found from start %d, residual %.3e", index, residual)
            return SynthesisResult(Isometry(x), value, residual, index)
        return None

    best = math.inf
    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            outcomes = list(pool.map(run, starts))
        for index, (x, residual) in enumerate(outcomes):
            best = min(best, residual)
            found = accept(index, x, residual)
            if found:
                return found
    else:
        for index, start in enumerate(starts):
            x, residual = run(start)
            best = min(best, residual)
            found = accept(index, x, residual)
            if found:
                return found
    raise SynthesisFailed(f"no isometry found for k={k}", best)


def synthesize_isometry(matrix, k, lam, on_boundary=False, settings=None, seed=0):
    """Isometry ``X`` with ``X^* A X = lam I_k`` found by multi-start descent.

    Points on the boundary of the range get the relaxed
    ``boundary_compression_tol`` before the search is declared failed.
    """
    settings = settings or get_settings()
    try:
        return _synthesize(matrix, k, complex(lam), settings.compression_tol, settings, seed).isometry
    except SynthesisFailed:
        if not on_boundary:
            raise
        logger.warning("relaxing synthesis tolerance for a boundary point")
        return _synthesize(
            matrix, k, complex(lam), settings.boundary_compression_tol, settings, seed
        ).isometry


def synthesize_any_isometry(matrix, k, settings=None, seed=0):
    """Isometry compressing ``A`` to some scalar; the scalar is part of the answer."""
    settings = settings or get_settings()
    return _synthesize(matrix, k, None, settings.compression_tol, settings, seed)
