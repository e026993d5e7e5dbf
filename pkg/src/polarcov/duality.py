"""Polar duality for centered ellipsoids.

Three dualities are provided:

* the hbar-polar dual of an ellipsoid on a Lagrangian plane ``l``, carried
  by ``J l`` (for ``l_X`` this is the usual ``{p : sup_x p.x <= hbar}``),
* the symplectic polar dual of a phase space ellipsoid,
  ``{z' : sup_z omega(z, z') <= hbar}``,
* the Lagrangian polar dual of an ellipsoid on ``l`` with respect to a
  transverse plane ``l'``.

All set relations are decided on shape matrices (Loewner order), never by
sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import (
    CovarianceMatrix,
    PhaseSpaceEllipsoid,
    SubspaceEllipsoid,
    covariance_ellipsoid,
)
from .errors import DimensionError, ValidationError
from .lagrangian import LagrangianFrame, LagrangianPlane, basis_of, canonical_frame, frame_transport
from .linalg import matrix_inv_sqrt_spd, max_abs, spd_inverse
from .symplectic import check_symplectic, standard_J, symplectic_inverse
from .tolerances import TOL_QUANT, TOL_SYMP, TOL_TRANS

__all__ = [
    "QuantumBlob",
    "InclusionResult",
    "polar_dual",
    "symplectic_polar_dual",
    "lagrangian_polar_dual",
    "john_blob",
    "inclusion_test",
    "loewner_margin",
    "is_fixed_point",
]


@dataclass(frozen=True, eq=False)
class QuantumBlob:
    """The ellipsoid ``S(B^{2n}(sqrt(hbar)))`` for symplectic ``S``."""

    S: np.ndarray
    hbar: float

    def __post_init__(self):
        S = check_symplectic(self.S, 10 * TOL_SYMP, "blob factor")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.S.shape[0] // 2

    @property
    def shape(self) -> np.ndarray:
        """``(S S^T)^{-1} = S^{-T} S^{-1}``, itself symplectic."""
        Si = symplectic_inverse(self.S)
        M = Si.T @ Si
        return 0.5 * (M + M.T)

    def ellipsoid(self) -> PhaseSpaceEllipsoid:
        return PhaseSpaceEllipsoid(self.shape, self.hbar)

    def covariance(self) -> CovarianceMatrix:
        """Covariance matrix whose covariance ellipsoid is the blob: ``(hbar/2) S S^T``."""
        return CovarianceMatrix(0.5 * self.hbar * (self.S @ self.S.T), self.hbar)

    def boundary(self, k: int = 256, rng=0) -> np.ndarray:
        """Images of points on the sphere of radius ``sqrt(hbar)``."""
        d = 2 * self.n
        if d == 2:
            t = 2 * np.pi * np.arange(k) / k
            dirs = np.column_stack([np.cos(t), np.sin(t)])
        else:
            g = np.random.default_rng(rng).standard_normal((k, d))
            dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
        return np.sqrt(self.hbar) * dirs @ self.S.T


@dataclass(frozen=True)
class InclusionResult:
    """Outcome of :func:`inclusion_test`.

    ``margin`` is the smallest eigenvalue of ``shape_dual - shape_primal``;
    ``spread`` the largest absolute eigenvalue of that difference.
    """

    verdict: str
    margin: float
    spread: float
    shape_primal: np.ndarray
    shape_dual: np.ndarray

    @property
    def included(self) -> bool:
        return self.verdict != "not_subset"


def polar_dual(e: SubspaceEllipsoid) -> SubspaceEllipsoid:
    """hbar-polar dual: shape ``A^{-1}`` carried by ``J l``.

    The intrinsic coordinates ``u`` on ``l`` and ``v`` on ``J l`` (bases
    ``T`` and ``J T``) are paired by ``omega(T u, J T v) = u . v``, which
    for ``l_X`` and ``l_P`` is the pairing ``x . p`` up to the sign of the
    parametrization. Applying the map twice returns the input.
    """
    return SubspaceEllipsoid(e.plane.dual_plane(), spd_inverse(e.shape), e.hbar)


def symplectic_polar_dual(omega: PhaseSpaceEllipsoid) -> PhaseSpaceEllipsoid:
    """Symplectic polar dual, shape ``-J M^{-1} J``."""
    if not omega.is_centered:
        raise ValidationError("symplectic polar dual requires a centered ellipsoid")
    J = standard_J(omega.n)
    return PhaseSpaceEllipsoid(-J @ spd_inverse(omega.M) @ J, omega.hbar)


def _canonical_data(x_ell: SubspaceEllipsoid, frame: LagrangianFrame, tol_trans):
    """Frame transport ``S`` and the shape of ``S^{-1}(X_l)`` on ``l_X`` in ``x`` coordinates."""
    if x_ell.n != frame.n:
        raise DimensionError("ellipsoid and frame dimensions differ")
    if not x_ell.plane.same_as(frame.ell):
        raise ValidationError("ellipsoid is not carried by the first plane of the frame")
    n = frame.n
    S = frame_transport(canonical_frame(n), frame, tol_trans)
    # S^{-1} T = [W; 0] maps intrinsic coordinates u to x = W u
    W = (symplectic_inverse(S) @ basis_of(x_ell.plane))[:n]
    Wi = np.linalg.inv(W)
    shape_x = Wi.T @ x_ell.shape @ Wi
    return S, 0.5 * (shape_x + shape_x.T)


def lagrangian_polar_dual(
    x_ell: SubspaceEllipsoid, frame: LagrangianFrame, tol_trans: float = TOL_TRANS
) -> SubspaceEllipsoid:
    """Dual ``{z' in l' : sup_{z in X_l} omega(z, z') <= hbar}`` of an ellipsoid on ``l``.

    The frame is moved to ``(l_X, l_P)`` by a symplectic ``S``; there the
    dual of ``{A_x x . x <= hbar}`` is ``{A_x^{-1} p . p <= hbar}``, which is
    then carried back to ``l'`` by ``S``.
    """
    n = frame.n
    S, shape_x = _canonical_data(x_ell, frame, tol_trans)
    # canonical p -> intrinsic coordinates v on l': v = T'^T S [0; I] p
    Wp = basis_of(frame.ell_prime).T @ S[:, n:]
    Wpi = np.linalg.inv(Wp)
    shape = Wpi.T @ spd_inverse(shape_x) @ Wpi
    return SubspaceEllipsoid(frame.ell_prime, shape, x_ell.hbar)


def john_blob(
    x_ell: SubspaceEllipsoid, frame: LagrangianFrame, tol_trans: float = TOL_TRANS
) -> QuantumBlob:
    """Maximal volume ellipsoid of ``X_l x (X_l)^hbar_{l'}``, a quantum blob.

    In canonical coordinates ``X = A(B_X^n(sqrt(hbar)))`` with
    ``A = A_x^{-1/2}``, and the John ellipsoid of ``A(B_X) x A^{-1}(B_P)``
    is ``S_A(B^{2n}(sqrt(hbar)))`` for ``S_A = diag(A, A^{-1})``. The
    returned factor is ``S S_A``.
    """
    n = frame.n
    S, shape_x = _canonical_data(x_ell, frame, tol_trans)
    A = matrix_inv_sqrt_spd(shape_x)
    Z = np.zeros((n, n))
    S_A = np.block([[A, Z], [Z, spd_inverse(A)]])
    return QuantumBlob(S @ S_A, x_ell.hbar)


def loewner_margin(outer, inner):
    """Smallest and largest absolute eigenvalue of ``outer - inner``.

    ``{M1 u . u <= h}`` lies inside ``{M2 u . u <= h}`` iff ``M1 >= M2``, so
    a nonnegative first value certifies the inclusion of the body with
    shape ``outer`` in the body with shape ``inner``.
    """
    d = np.asarray(outer, float) - np.asarray(inner, float)
    w = np.linalg.eigvalsh(0.5 * (d + d.T))
    return float(w[0]), float(np.max(np.abs(w)))


def inclusion_test(
    cov: CovarianceMatrix, ell: LagrangianPlane, tol_quant: float = TOL_QUANT
) -> InclusionResult:
    """Compare the sections of the symplectic dual of ``Omega_Sigma`` and of ``Omega_Sigma`` by ``l``.

    Both sections are written in the intrinsic coordinates of ``l``. The
    dual section is contained in the primal one iff its shape dominates
    the primal shape in the Loewner order.

    Returns
    -------
    InclusionResult
        ``verdict`` is ``"not_subset"`` when the smallest eigenvalue of
        ``shape_dual - shape_primal`` is below ``-tol_quant``, ``"equal"``
        when every eigenvalue lies within ``tol_quant`` of zero, and
        ``"strict_subset"`` otherwise.
    """
    omega = covariance_ellipsoid(cov)
    dual = symplectic_polar_dual(omega)
    T = basis_of(ell)
    primal = T.T @ omega.M @ T
    dual_shape = T.T @ dual.M @ T
    margin, spread = loewner_margin(dual_shape, primal)
    if margin < -tol_quant:
        verdict = "not_subset"
    elif spread <= tol_quant:
        verdict = "equal"
    else:
        verdict = "strict_subset"
    return InclusionResult(verdict, margin, spread, primal, dual_shape)


def is_fixed_point(omega: PhaseSpaceEllipsoid, rtol: float = 1e-9) -> bool:
    """True iff the symplectic polar dual has the same shape matrix (relative ``rtol``)."""
    dual = symplectic_polar_dual(omega)
    return max_abs(dual.M - omega.M) <= rtol * max(1.0, max_abs(omega.M))
