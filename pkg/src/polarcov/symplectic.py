"""Kernels for the standard symplectic group Sp(n).

Phase space points are ordered ``z = (x, p)`` and the standard symplectic
matrix is ``J = [[0, I], [-I, 0]]``. Symplectic matrices are plain
``(2n, 2n)`` float arrays; the helpers here validate, build, invert and
factor them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FactorizationError, ValidationError
from .linalg import (
    as_square,
    blocks,
    from_blocks,
    half_dim,
    matrix_inv_sqrt_spd,
    matrix_sqrt_spd,
    max_abs,
    random_spd,
    random_symmetric,
    symmetrize,
)
from .tolerances import TOL_PD, TOL_SYMP

__all__ = [
    "standard_J",
    "symplectic_residual",
    "is_symplectic",
    "check_symplectic",
    "generator_VP",
    "generator_ML",
    "symplectic_inverse",
    "SympRotation",
    "PreIwasawa",
    "pre_iwasawa",
    "matrix_sqrt_spd",
    "omega",
    "random_symplectic",
    "random_rotation",
]


def standard_J(n: int) -> np.ndarray:
    """The ``2n x 2n`` standard symplectic matrix ``[[0, I], [-I, 0]]``."""
    if n < 1:
        raise DimensionError(f"n must be at least 1, got {n}")
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def omega(z, w) -> float:
    """Standard symplectic form ``omega(z, w) = (J z) . w``."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    n = z.shape[0] // 2
    # (J z) = (p, -x)
    return float(z[n:] @ w[:n] - z[:n] @ w[n:])


def symplectic_residual(M) -> float:
    """Max-entry norm of ``M^T J M - J``."""
    n = half_dim(M)
    M = np.asarray(M, dtype=float)
    J = standard_J(n)
    return max_abs(M.T @ J @ M - J)


def is_symplectic(M, tol: float = TOL_SYMP) -> bool:
    """True iff ``max|M^T J M - J| <= tol``.

    Raises
    ------
    DimensionError
        If ``M`` is not square with even side.
    """
    return symplectic_residual(M) <= tol


def check_symplectic(M, tol: float = TOL_SYMP, name="matrix") -> np.ndarray:
    """Return ``M`` as an array after verifying it is symplectic."""
    M = as_square(M, name)
    resid = symplectic_residual(M)
    if resid > tol:
        raise ValidationError(f"{name} is not symplectic (residual {resid:.3e})")
    return M


def generator_VP(P, tol: float = TOL_SYMP) -> np.ndarray:
    """Shear ``[[I, 0], [-P, I]]`` for symmetric ``P``.

    This is the ``V_P`` factor that appears in ``S = V_P M_L R`` (see
    :func:`pre_iwasawa`).
    """
    P = symmetrize(P, tol=tol, name="P")
    n = P.shape[0]
    return from_blocks(np.eye(n), np.zeros((n, n)), -P, np.eye(n))


def generator_ML(L, tol: float = TOL_SYMP) -> np.ndarray:
    """Dilation ``[[L^{-1}, 0], [0, L^T]]`` for invertible ``L``."""
    L = as_square(L, "L")
    n = L.shape[0]
    s = np.linalg.svd(L, compute_uv=False)
    if s[-1] <= tol * max(1.0, s[0]):
        raise ValidationError(f"L is singular (smallest singular value {s[-1]:.3e})")
    Z = np.zeros((n, n))
    return from_blocks(np.linalg.inv(L), Z, Z, L.T)


def symplectic_inverse(S) -> np.ndarray:
    """Inverse of a symplectic matrix from its blocks: ``[[D^T, -B^T], [-C^T, A^T]]``.

    No general-purpose inversion is performed, so the call is exact up to
    the symplecticity of ``S`` itself.
    """
    A, B, C, D = blocks(S)
    return from_blocks(D.T, -B.T, -C.T, A.T)


@dataclass(frozen=True)
class SympRotation:
    """Symplectic rotation ``[[E, F], [-F, E]]`` with ``E + iF`` unitary."""

    E: np.ndarray
    F: np.ndarray

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return from_blocks(self.E, self.F, -self.F, self.E)

    @property
    def unitary(self) -> np.ndarray:
        return self.E + 1j * self.F

    @classmethod
    def from_matrix(cls, R, tol: float = TOL_SYMP) -> "SympRotation":
        A, B, C, D = blocks(R)
        if max_abs(A - D) > tol or max_abs(B + C) > tol:
            raise ValidationError("matrix is not of the form [[E, F], [-F, E]]")
        return cls(0.5 * (A + D), 0.5 * (B - C))

    def residuals(self) -> tuple[float, float]:
        """Orthogonality and symplecticity residuals of the assembled matrix."""
        R = self.matrix
        return max_abs(R.T @ R - np.eye(2 * self.n)), symplectic_residual(R)


@dataclass(frozen=True)
class PreIwasawa:
    """Factors of ``S = V_P M_L R`` with ``P`` symmetric, ``L`` SPD, ``R`` a rotation."""

    P: np.ndarray
    L: np.ndarray
    R: SympRotation

    def matrix(self) -> np.ndarray:
        """Reassemble ``V_P M_L R``."""
        return generator_VP(self.P) @ generator_ML(self.L) @ self.R.matrix


def pre_iwasawa(S, tol: float = TOL_SYMP, tol_pd: float = TOL_PD) -> PreIwasawa:
    """Pre-Iwasawa factorization ``S = V_P M_L R``.

    With ``S = [[A, B], [C, D]]`` and ``W = A A^T + B B^T``::

        P = -(C A^T + D B^T) W^{-1}
        L = W^{-1/2}
        E = W^{-1/2} A,   F = W^{-1/2} B

    Raises
    ------
    FactorizationError
        If ``W`` is numerically singular (impossible for a symplectic input)
        or if ``P`` comes out asymmetric beyond ``tol``.
    """
    A, B, C, D = blocks(S)
    W = A @ A.T + B @ B.T
    W = 0.5 * (W + W.T)
    try:
        L = matrix_inv_sqrt_spd(W, tol_pd=tol_pd)
    except ValueError as exc:
        raise FactorizationError(
            f"A A^T + B B^T is singular; input is not symplectic ({exc})"
        ) from exc
    P = -(C @ A.T + D @ B.T) @ (L @ L)
    asym = max_abs(P - P.T)
    if asym > tol * max(1.0, max_abs(P)):
        raise FactorizationError(f"P is not symmetric (residual {asym:.3e})")
    P = 0.5 * (P + P.T)
    return PreIwasawa(P=P, L=L, R=SympRotation(L @ A, L @ B))


def random_rotation(n: int, rng) -> np.ndarray:
    """Random symplectic rotation built from a Haar-random unitary."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return from_blocks(Q.real, Q.imag, -Q.imag, Q.real)


def random_symplectic(n: int, rng=None, n_factors: int = 6) -> np.ndarray:
    """Product of ``n_factors`` random generators of Sp(n).

    Factors are drawn among ``V_P`` (eigenvalues of ``P`` uniform in
    ``[-1, 1]``), ``M_L`` (log-spectrum of SPD ``L`` uniform in ``[-1, 1]``),
    ``J`` and random symplectic rotations. The bounded spectra keep the
    condition number of the product moderate.
    """
    rng = np.random.default_rng(rng)
    S = np.eye(2 * n)
    for _ in range(n_factors):
        kind = rng.integers(4)
        if kind == 0:
            G = generator_VP(random_symmetric(n, rng))
        elif kind == 1:
            G = generator_ML(random_spd(n, rng))
        elif kind == 2:
            G = standard_J(n)
        else:
            G = random_rotation(n, rng)
        S = S @ G
    return S

