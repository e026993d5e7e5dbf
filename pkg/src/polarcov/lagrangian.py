"""Lagrangian planes, Lagrangian frames and symplectic maps between frames.

A Lagrangian plane is stored through the equation ``A x + B p = 0``. On
construction the pair is left-normalized, ``(A, B) -> (G A, G B)`` with
``G = (A A^T + B B^T)^{-1/2}``, which keeps the solution set and makes the
rows of ``[A B]`` orthonormal. The columns of ``T = [-B^T; A^T]`` are then an
orthonormal basis of the plane, and ``N = [A B]`` gives orthonormal
coordinates on the transverse direction ``J(plane)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, TransversalityError, ValidationError
from .linalg import matrix_inv_sqrt_spd, max_abs, subspace_distance
from .symplectic import random_symplectic, standard_J, symplectic_inverse
from .tolerances import TOL_PD, TOL_SYMP, TOL_TRANS

__all__ = [
    "LagrangianPlane",
    "LagrangianFrame",
    "AffineLagrangian",
    "coordinate_plane_X",
    "coordinate_plane_P",
    "coordinate_plane",
    "line",
    "basis_of",
    "plane_image",
    "symplectic_basis",
    "frame_transport",
    "canonical_frame",
    "random_plane",
    "random_frame",
]


@dataclass(frozen=True, eq=False)
class LagrangianPlane:
    """The Lagrangian subspace ``{(x, p) : A x + B p = 0}``.

    Use :meth:`from_equations` or :meth:`from_basis` to build validated
    instances; the raw constructor assumes ``(A, B)`` is already normalized.
    """

    A: np.ndarray
    B: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_equations(cls, A, B, tol=TOL_SYMP, tol_pd=TOL_PD) -> "LagrangianPlane":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if A.shape != B.shape or A.shape[0] != A.shape[1]:
            raise DimensionError(
                f"A and B must be square of equal size, got {A.shape} and {B.shape}"
            )
        AB = np.hstack([A, B])
        s = np.linalg.svd(AB, compute_uv=False)
        if s[-1] <= tol_pd * s[0]:
            raise ValidationError("rank [A B] < n: equations do not define an n-plane")
        W = AB @ AB.T
        G = matrix_inv_sqrt_spd(0.5 * (W + W.T))
        A, B = G @ A, G @ B
        # ker [A B] is isotropic iff A B^T is symmetric
        resid = max_abs(A @ B.T - B @ A.T)
        if resid > tol:
            raise ValidationError(f"plane is not Lagrangian (A B^T asymmetry {resid:.3e})")
        return cls(A, B)

    @classmethod
    def from_basis(cls, T, tol=TOL_SYMP) -> "LagrangianPlane":
        """Plane spanned by the columns of a ``2n x n`` matrix."""
        T = np.asarray(T, dtype=float)
        if T.ndim != 2 or T.shape[0] != 2 * T.shape[1]:
            raise DimensionError(f"basis must be 2n x n, got {T.shape}")
        n = T.shape[1]
        Q, R = np.linalg.qr(T)
        if np.min(np.abs(np.diag(R))) <= TOL_PD * max(1.0, np.max(np.abs(R))):
            raise ValidationError("basis columns are linearly dependent")
        X, Y = Q[:n], Q[n:]
        resid = max_abs(X.T @ Y - Y.T @ X)
        if resid > tol:
            raise ValidationError(f"span is not Lagrangian (omega residual {resid:.3e})")
        return cls(Y.T.copy(), -X.T.copy())

    @property
    def basis(self) -> np.ndarray:
        return basis_of(self)

    @property
    def normal(self) -> np.ndarray:
        """``[A B]``: orthonormal rows spanning the orthogonal complement."""
        return np.hstack([self.A, self.B])

    @property
    def rotation(self) -> np.ndarray:
        """The symplectic rotation ``U = [[A, B], [-B, A]]``; ``U^T`` maps ``l_P`` onto the plane."""
        return np.block([[self.A, self.B], [-self.B, self.A]])

    def projector(self) -> np.ndarray:
        T = self.basis
        return T @ T.T

    def contains(self, z, tol=1e-9) -> bool:
        z = np.asarray(z, dtype=float)
        return bool(np.linalg.norm(self.normal @ z) <= tol * max(1.0, np.linalg.norm(z)))

    def same_as(self, other: "LagrangianPlane", tol=1e-8) -> bool:
        """Set equality, decided through the projector distance."""
        return subspace_distance(self.basis, other.basis) <= tol

    def dual_plane(self) -> "LagrangianPlane":
        """``J(plane)``, the orthogonal complement, with basis ``J T``."""
        return LagrangianPlane(self.B.copy(), -self.A.copy())

    def invariant_residuals(self) -> dict:
        A, B = self.A, self.B
        n = self.n
        T = self.basis
        return {
            "row_normalization": max_abs(A @ A.T + B @ B.T - np.eye(n)),
            "column_normalization": max_abs(A.T @ A + B.T @ B - np.eye(n)),
            "symmetry": max_abs(A.T @ B - B.T @ A),
            "isotropy": max_abs(T.T @ standard_J(n) @ T),
        }


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """A pair of transverse Lagrangian planes."""

    ell: LagrangianPlane
    ell_prime: LagrangianPlane

    def __post_init__(self):
        if self.ell.n != self.ell_prime.n:
            raise DimensionError("frame planes have different dimensions")

    @property
    def n(self) -> int:
        return self.ell.n

    def transversality(self) -> float:
        """Smallest singular value of ``[T, T']``; zero when the planes meet."""
        M = np.hstack([self.ell.basis, self.ell_prime.basis])
        return float(np.linalg.svd(M, compute_uv=False)[-1])

    def check(self, tol_trans=TOL_TRANS) -> "LagrangianFrame":
        s = self.transversality()
        if s <= tol_trans:
            raise TransversalityError(
                f"planes are not transverse (smallest singular value {s:.3e})"
            )
        return self

    def split(self, z):
        """Coordinates ``(a, b)`` with ``z = T a + T' b``."""
        M = np.hstack([self.ell.basis, self.ell_prime.basis])
        ab = np.linalg.solve(M, np.asarray(z, dtype=float))
        return ab[: self.n], ab[self.n :]


@dataclass(frozen=True, eq=False)
class AffineLagrangian:
    """The affine plane ``plane + offset``."""

    plane: LagrangianPlane
    offset: np.ndarray

    def point(self, u) -> np.ndarray:
        """``x(u) = -B^T u + x``, ``p(u) = A^T u + p``."""
        return self.plane.basis @ np.asarray(u, dtype=float) + self.offset


def coordinate_plane_X(n: int) -> LagrangianPlane:
    """``l_X = R^n_x x 0``, the plane ``p = 0``."""
    return LagrangianPlane(np.zeros((n, n)), np.eye(n))


def coordinate_plane_P(n: int) -> LagrangianPlane:
    """``l_P = 0 x R^n_p``, the plane ``x = 0``."""
    return LagrangianPlane(np.eye(n), np.zeros((n, n)))


def coordinate_plane(n: int, alpha=()) -> LagrangianPlane:
    """Coordinate Lagrangian plane with free coordinates ``p_j`` for ``j`` in ``alpha``.

    Indices are zero-based. The free coordinates are ``x_j`` for ``j`` not
    in ``alpha`` and ``p_j`` for ``j`` in ``alpha``; an empty ``alpha``
    gives ``l_X`` and ``alpha = range(n)`` gives ``l_P``.
    """
    alpha = set(int(j) for j in alpha)
    bad = [j for j in alpha if not 0 <= j < n]
    if bad:
        raise DimensionError(f"coordinate indices {sorted(bad)} out of range for n={n}")
    mask = np.array([j in alpha for j in range(n)], dtype=float)
    return LagrangianPlane(np.diag(mask), np.diag(1.0 - mask))


def line(a: float) -> LagrangianPlane:
    """The line ``p = a x`` in the phase plane."""
    return LagrangianPlane.from_equations([[a]], [[-1.0]])


def basis_of(plane: LagrangianPlane) -> np.ndarray:
    """Orthonormal basis ``T = [-B^T; A^T]`` (shape ``2n x n``) of the plane."""
    return np.vstack([-plane.B.T, plane.A.T])


def plane_image(S, plane: LagrangianPlane) -> LagrangianPlane:
    """The plane ``S(plane)`` for symplectic ``S``."""
    return LagrangianPlane.from_basis(np.asarray(S, dtype=float) @ basis_of(plane))


def canonical_frame(n: int) -> LagrangianFrame:
    return LagrangianFrame(coordinate_plane_X(n), coordinate_plane_P(n))


def symplectic_basis(frame: LagrangianFrame, tol_trans=TOL_TRANS) -> np.ndarray:
    """Symplectic basis adapted to a frame.

    Returns ``Z = [e_1..e_n, f_1..f_n]`` with ``e_i`` spanning ``ell``,
    ``f_j`` spanning ``ell_prime`` and ``omega(f_i, e_j) = delta_ij``. Such a
    matrix satisfies ``Z^T J Z = J``. The construction is symplectic
    Gram-Schmidt with complete pivoting on ``|omega(f, e)|``.
    """
    frame.check(tol_trans)
    n = frame.n
    J = standard_J(n)
    E = list(frame.ell.basis.T.copy())
    F = list(frame.ell_prime.basis.T.copy())
    e_out, f_out = [], []
    for _ in range(n):
        # W[i, j] = omega(f_i, e_j) = (J f_i) . e_j
        W = np.array([[J @ f @ e for e in E] for f in F])
        i, j = np.unravel_index(np.argmax(np.abs(W)), W.shape)
        if abs(W[i, j]) <= tol_trans:
            raise TransversalityError("symplectic Gram-Schmidt broke down")
        f_star = F.pop(i) / W[i, j]
        e_star = E.pop(j)
        E = [e - (J @ f_star @ e) * e_star for e in E]
        F = [f - (J @ f @ e_star) * f_star for f in F]
        e_out.append(e_star)
        f_out.append(f_star)
    return np.column_stack(e_out + f_out)


def frame_transport(
    source: LagrangianFrame, target: LagrangianFrame, tol_trans=TOL_TRANS
) -> np.ndarray:
    """A symplectic ``S`` with ``S(source.ell) = target.ell`` and ``S(source.ell') = target.ell'``.

    ``S`` maps a symplectic basis adapted to ``source`` onto one adapted to
    ``target``; it is one of many valid choices and only the plane images
    are guaranteed.
    """
    Zs = symplectic_basis(source, tol_trans)
    Zt = symplectic_basis(target, tol_trans)
    return Zt @ symplectic_inverse(Zs)


def random_plane(n: int, rng=None) -> LagrangianPlane:
    """Image of ``l_X`` under a random symplectic matrix."""
    rng = np.random.default_rng(rng)
    return plane_image(random_symplectic(n, rng, n_factors=3), coordinate_plane_X(n))


def random_frame(n: int, rng=None, n_factors: int = 3) -> LagrangianFrame:
    """Image of the canonical frame under a random symplectic matrix."""
    rng = np.random.default_rng(rng)
    S = random_symplectic(n, rng, n_factors=n_factors)
    return LagrangianFrame(
        plane_image(S, coordinate_plane_X(n)), plane_image(S, coordinate_plane_P(n))
    )
