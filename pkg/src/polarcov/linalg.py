"""Small dense linear-algebra helpers used throughout the package."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError, ValidationError
from .tolerances import TOL_PD, TOL_SYMP


def as_square(M, name="matrix") -> np.ndarray:
    """Return ``M`` as a float array, raising if it is not square."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def half_dim(M, name="matrix") -> int:
    """Half the side of a square matrix with even side."""
    M = as_square(M, name)
    if M.shape[0] % 2:
        raise DimensionError(f"{name} must have even side, got {M.shape[0]}")
    return M.shape[0] // 2


def blocks(M):
    """Split a ``2n x 2n`` matrix into its four ``n x n`` blocks.

    Returns
    -------
    tuple of ndarray
        ``(A, B, C, D)`` with ``M = [[A, B], [C, D]]``.
    """
    n = half_dim(M)
    M = np.asarray(M, dtype=float)
    return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]


def from_blocks(A, B, C, D) -> np.ndarray:
    return np.block([[A, B], [C, D]])


def max_abs(M) -> float:
    """Largest absolute entry; the residual norm used for every tolerance check."""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def symmetrize(M, tol=TOL_SYMP, name="matrix") -> np.ndarray:
    """Return ``(M + M.T) / 2`` after checking the asymmetry is below ``tol``.

    The check is relative to ``max(1, max|M|)`` so that large, well-formed
    matrices are not rejected for roundoff.
    """
    M = as_square(M, name)
    resid = max_abs(M - M.T)
    if resid > tol * max(1.0, max_abs(M)):
        raise ValidationError(f"{name} is not symmetric (asymmetry {resid:.3e})")
    return 0.5 * (M + M.T)


def check_spd(M, tol_pd=TOL_PD, name="matrix") -> np.ndarray:
    """Validate a symmetric matrix is positive definite; return its eigenvalues."""
    w = np.linalg.eigvalsh(M)
    if w[0] <= tol_pd:
        raise DomainError(
            f"{name} is not positive definite (smallest eigenvalue {w[0]:.6e})"
        )
    return w


def _spd_power(M, power, tol_pd):
    M = symmetrize(M, tol=np.inf)
    w, V = np.linalg.eigh(M)
    if w[0] <= tol_pd:
        raise DomainError(
            f"matrix is not positive definite (eigenvalue {w[0]:.6e} <= {tol_pd:g})"
        )
    R = (V * w**power) @ V.T
    return 0.5 * (R + R.T)


def matrix_sqrt_spd(M, tol_pd=TOL_PD) -> np.ndarray:
    """Unique symmetric positive definite square root.

    Computed from the orthogonal eigendecomposition ``M = V diag(w) V^T``.

    Raises
    ------
    DomainError
        If some eigenvalue of ``M`` is not above ``tol_pd``; the message
        names the offending eigenvalue.
    """
    return _spd_power(as_square(M), 0.5, tol_pd)


def matrix_inv_sqrt_spd(M, tol_pd=TOL_PD) -> np.ndarray:
    """``M^{-1/2}`` for symmetric positive definite ``M``."""
    return _spd_power(as_square(M), -0.5, tol_pd)


def spd_inverse(M, tol_pd=TOL_PD) -> np.ndarray:
    """Inverse of an SPD matrix through its eigendecomposition (exactly symmetric)."""
    return _spd_power(as_square(M), -1.0, tol_pd)


def projector(T) -> np.ndarray:
    """Orthogonal projector onto the column space of ``T``."""
    Q, _ = np.linalg.qr(np.asarray(T, dtype=float))
    return Q @ Q.T


def subspace_distance(T1, T2) -> float:
    """Frobenius distance between the orthogonal projectors onto two column spaces."""
    return float(np.linalg.norm(projector(T1) - projector(T2)))


def random_orthogonal(n, rng) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_spd(n, rng, log_range=1.0) -> np.ndarray:
    """SPD matrix ``Q diag(exp(u)) Q^T`` with ``u`` uniform in ``[-log_range, log_range]``."""
    Q = random_orthogonal(n, rng)
    w = np.exp(rng.uniform(-log_range, log_range, n))
    M = (Q * w) @ Q.T
    return 0.5 * (M + M.T)


def random_symmetric(n, rng, bound=1.0) -> np.ndarray:
    """Symmetric matrix with eigenvalues uniform in ``[-bound, bound]``."""
    Q = random_orthogonal(n, rng)
    w = rng.uniform(-bound, bound, n)
    M = (Q * w) @ Q.T
    return 0.5 * (M + M.T)
