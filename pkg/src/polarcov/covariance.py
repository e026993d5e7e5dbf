"""Covariance matrices, covariance ellipsoids and their projections.

A covariance matrix ``Sigma`` (``2n x 2n``, SPD) always travels with the
value of ``hbar`` it is expressed in. Its covariance ellipsoid is
``{z : (1/2) Sigma^{-1} z . z <= 1}``, stored as the phase space ellipsoid
``{z : M z . z <= hbar}`` with ``M = (hbar/2) Sigma^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, ValidationError
from .lagrangian import (
    LagrangianFrame,
    LagrangianPlane,
    basis_of,
    coordinate_plane_P,
    coordinate_plane_X,
    plane_image,
)
from .linalg import (
    blocks,
    check_spd,
    from_blocks,
    half_dim,
    matrix_inv_sqrt_spd,
    matrix_sqrt_spd,
    max_abs,
    symmetrize,
)
from .symplectic import standard_J
from .tolerances import TOL_PD, TOL_QUANT

__all__ = [
    "CovarianceMatrix",
    "WilliamsonForm",
    "PhaseSpaceEllipsoid",
    "SubspaceEllipsoid",
    "QuantumVerdict",
    "williamson",
    "symplectic_eigenvalues",
    "is_quantum",
    "is_pure",
    "purity_residuals",
    "heisenberg_check",
    "block_inverse",
    "schur_complements",
    "project_onto",
    "project_along",
    "covariance_ellipsoid",
    "ellipsoid_covariance",
    "boundary_points",
    "ellipse_coefficients",
    "QUANTUM_METHODS",
]

QUANTUM_METHODS = ("hermitian_psd", "symplectic_spectrum", "dual_inclusion")


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric positive definite ``2n x 2n`` covariance matrix with its ``hbar``.

    The matrix is symmetrized once on construction (after an asymmetry
    check), so the block accessors satisfy ``xp.T == px`` exactly.
    """

    sigma: np.ndarray
    hbar: float
    tol_pd: float = field(default=TOL_PD, repr=False)

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        half_dim(self.sigma, "covariance matrix")
        sigma = symmetrize(self.sigma, name="covariance matrix")
        check_spd(sigma, self.tol_pd, "covariance matrix")
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.sigma.shape[0] // 2

    @property
    def xx(self) -> np.ndarray:
        return self.sigma[: self.n, : self.n]

    @property
    def xp(self) -> np.ndarray:
        return self.sigma[: self.n, self.n :]

    @property
    def px(self) -> np.ndarray:
        return self.sigma[self.n :, : self.n]

    @property
    def pp(self) -> np.ndarray:
        return self.sigma[self.n :, self.n :]

    def transformed(self, S) -> "CovarianceMatrix":
        """Covariance of the pushed-forward distribution, ``S Sigma S^T``."""
        S = np.asarray(S, dtype=float)
        return CovarianceMatrix(S @ self.sigma @ S.T, self.hbar)


@dataclass(frozen=True, eq=False)
class WilliamsonForm:
    """``Sigma = S^T D S`` with ``D = diag(lambdas, lambdas)``."""

    S: np.ndarray
    lambdas: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.diag(np.concatenate([self.lambdas, self.lambdas]))

    def reconstruct(self) -> np.ndarray:
        return self.S.T @ self.D @ self.S


@dataclass(frozen=True, eq=False)
class PhaseSpaceEllipsoid:
    """``{z : M (z - c) . (z - c) <= hbar}`` for SPD ``M``."""

    M: np.ndarray
    hbar: float
    center: np.ndarray = None

    def __post_init__(self):
        n = half_dim(self.M, "shape matrix")
        M = symmetrize(self.M, name="shape matrix")
        check_spd(M, name="shape matrix")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "hbar", float(self.hbar))
        c = np.zeros(2 * n) if self.center is None else np.asarray(self.center, float)
        if c.shape != (2 * n,):
            raise DimensionError(f"center must have length {2 * n}")
        object.__setattr__(self, "center", c)

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2

    @property
    def is_centered(self) -> bool:
        return not np.any(self.center)

    def form(self, z) -> np.ndarray:
        """``M (z - c) . (z - c)`` for one point or a stack of points (rows)."""
        d = np.atleast_2d(np.asarray(z, dtype=float)) - self.center
        return np.einsum("ij,jk,ik->i", d, self.M, d)

    def transformed(self, S) -> "PhaseSpaceEllipsoid":
        """Image under the linear map ``S``: shape ``S^{-T} M S^{-1}``."""
        S = np.asarray(S, dtype=float)
        Sinv = np.linalg.inv(S)
        return PhaseSpaceEllipsoid(Sinv.T @ self.M @ Sinv, self.hbar, S @ self.center)

    def section(self, plane: LagrangianPlane) -> "SubspaceEllipsoid":
        """Intersection with a plane through the center, in the plane's basis."""
        T = basis_of(plane)
        return SubspaceEllipsoid(plane, T.T @ self.M @ T, self.hbar)

    def boundary(self, k: int = 256, rng=0) -> np.ndarray:
        return boundary_points(self.M, self.hbar, k, rng) + self.center

    def volume(self) -> float:
        from scipy.special import gammaln

        d = 2 * self.n
        log_ball = 0.5 * d * np.log(np.pi * self.hbar) - gammaln(0.5 * d + 1)
        return float(np.exp(log_ball - 0.5 * np.linalg.slogdet(self.M)[1]))


@dataclass(frozen=True, eq=False)
class SubspaceEllipsoid:
    """Centered ellipsoid ``{T u : shape u . u <= hbar}`` carried by a Lagrangian plane.

    ``u`` are the intrinsic coordinates given by the orthonormal basis
    ``T = basis_of(plane)``.
    """

    plane: LagrangianPlane
    shape: np.ndarray
    hbar: float

    def __post_init__(self):
        shape = symmetrize(np.atleast_2d(np.asarray(self.shape, float)), name="shape")
        if shape.shape[0] != self.plane.n:
            raise DimensionError(
                f"shape is {shape.shape[0]}x{shape.shape[0]} but plane has n={self.plane.n}"
            )
        check_spd(shape, name="shape")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.plane.n

    def form(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return np.einsum("ij,jk,ik->i", u, self.shape, u)

    def intrinsic(self, z) -> np.ndarray:
        """Intrinsic coordinates ``T^T z`` of phase space points lying on the plane."""
        return np.atleast_2d(np.asarray(z, dtype=float)) @ basis_of(self.plane)

    def embed(self, u) -> np.ndarray:
        return np.atleast_2d(np.asarray(u, dtype=float)) @ basis_of(self.plane).T

    def boundary(self, k: int = 256, rng=0) -> np.ndarray:
        """Boundary points embedded in phase space (rows of length ``2n``)."""
        return self.embed(boundary_points(self.shape, self.hbar, k, rng))

    def same_as(self, other: "SubspaceEllipsoid", rtol=1e-9) -> bool:
        """Set equality: same plane and same quadratic form on it."""
        if not self.plane.same_as(other.plane):
            return False
        # express other's shape in self's intrinsic coordinates
        H = basis_of(other.plane).T @ basis_of(self.plane)
        shape = H.T @ other.shape @ H
        return max_abs(shape - self.shape) <= rtol * max(1.0, max_abs(self.shape))


@dataclass(frozen=True)
class QuantumVerdict:
    """Result of :func:`is_quantum`.

    ``margin`` is always ``min lambda_j - hbar/2``; ``statistic`` is the
    quantity the chosen method thresholded.
    """

    quantum: bool
    margin: float
    method: str
    statistic: float

    def __bool__(self):
        return self.quantum


def boundary_points(shape, hbar, k=256, rng=0) -> np.ndarray:
    """Points ``u`` with ``shape u . u = hbar``.

    One dimension yields the two endpoints, two dimensions ``k`` equally
    spaced angles, higher dimensions ``k`` seeded random directions.
    """
    shape = np.atleast_2d(np.asarray(shape, dtype=float))
    d = shape.shape[0]
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif d == 2:
        t = 2 * np.pi * np.arange(k) / k
        dirs = np.column_stack([np.cos(t), np.sin(t)])
    else:
        g = np.random.default_rng(rng).standard_normal((k, d))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    R = matrix_inv_sqrt_spd(shape)
    return np.sqrt(hbar) * dirs @ R


def _skew_canonical(K):
    """Orthogonal ``O`` and ``lam >= 0`` (descending) with ``O^T K O = [[0, L], [-L, 0]]``.

    ``K`` is real antisymmetric. The eigenvectors of the Hermitian matrix
    ``iK`` for positive eigenvalues ``lam`` are ``a + ib`` with
    ``K a = lam b`` and ``K b = -lam a``; ``sqrt(2) b`` and ``sqrt(2) a``
    become the x- and p-columns of ``O``.
    """
    n = K.shape[0] // 2
    w, V = np.linalg.eigh(1j * K)
    order = np.argsort(w)[::-1][:n]
    lam = w[order]
    Vp = V[:, order]
    O = np.sqrt(2.0) * np.hstack([Vp.imag, Vp.real])
    return O, lam


def williamson(cov: CovarianceMatrix) -> WilliamsonForm:
    """Williamson normal form ``Sigma = S^T D S``, ``S`` symplectic.

    Uses ``K = Sigma^{1/2} J Sigma^{1/2}`` brought to the canonical form
    ``O^T K O = D^{1/2} J D^{1/2}``; then ``S = D^{-1/2} O^T Sigma^{1/2}``.
    The symplectic eigenvalues come out sorted in decreasing order.
    """
    n = cov.n
    root = matrix_sqrt_spd(cov.sigma)
    K = root @ standard_J(n) @ root
    O, lam = _skew_canonical(0.5 * (K - K.T))
    d = np.concatenate([lam, lam]) ** -0.5
    S = (d[:, None] * O.T) @ root
    return WilliamsonForm(S=S, lambdas=lam)


def symplectic_eigenvalues(cov: CovarianceMatrix) -> np.ndarray:
    """Symplectic spectrum of ``Sigma`` in decreasing order.

    The moduli of the eigenvalues of the antisymmetric matrix
    ``Sigma^{1/2} J Sigma^{1/2}`` (equivalently of ``J Sigma``).
    """
    root = matrix_sqrt_spd(cov.sigma)
    K = root @ standard_J(cov.n) @ root
    w = np.linalg.eigvalsh(0.5j * (K - K.T))
    return w[::-1][: cov.n].copy()


def is_quantum(
    cov: CovarianceMatrix,
    method: str = "symplectic_spectrum",
    tol_quant: float = TOL_QUANT,
    plane: LagrangianPlane = None,
) -> QuantumVerdict:
    """Decide whether ``Sigma`` is the covariance matrix of a quantum state.

    Parameters
    ----------
    cov : CovarianceMatrix
    method : {"hermitian_psd", "symplectic_spectrum", "dual_inclusion"}
        ``hermitian_psd`` tests ``Sigma + (i hbar/2) J >= 0`` through the
        Hermitian-definite pencil ``(Sigma + (i hbar/2) J, Sigma)``, whose
        smallest eigenvalue must be ``>= -tol_quant / ||Sigma||``.
        ``symplectic_spectrum`` requires ``min lambda_j >= hbar/2 - tol_quant``.
        ``dual_inclusion`` checks that the section of the symplectic polar dual
        of the covariance ellipsoid by a Lagrangian plane lies inside the
        section of the ellipsoid itself. The default plane is ``S^T(l_X)``
        for the Williamson factor ``Sigma = S^T D S``, on which the section
        test is equivalent to the uncertainty principle.
    tol_quant : float
        Width of the accepted band below the threshold.
    plane : LagrangianPlane, optional
        Plane used by ``dual_inclusion``. A quantum covariance passes on
        every plane, but for ``n >= 2`` a fixed plane such as ``l_X`` can
        also pass for non-quantum matrices.

    Returns
    -------
    QuantumVerdict
        Truthy iff the state is quantum; carries ``min lambda_j - hbar/2``.
    """
    margin = float(symplectic_eigenvalues(cov)[-1] - 0.5 * cov.hbar)
    if method == "symplectic_spectrum":
        return QuantumVerdict(margin >= -tol_quant, margin, method, margin)
    if method == "hermitian_psd":
        H = cov.sigma + 0.5j * cov.hbar * standard_J(cov.n)
        mu = float(scipy.linalg.eigh(H, cov.sigma, eigvals_only=True)[0])
        scale = float(np.linalg.eigvalsh(cov.sigma)[-1])
        return QuantumVerdict(mu >= -tol_quant / scale, margin, method, mu)
    if method == "dual_inclusion":
        from .duality import inclusion_test

        if plane is None:
            plane = plane_image(williamson(cov).S.T, coordinate_plane_X(cov.n))
        res = inclusion_test(cov, plane, tol_quant=tol_quant)
        return QuantumVerdict(res.verdict != "not_subset", margin, method, res.margin)
    raise ValueError(f"unknown method {method!r}; expected one of {QUANTUM_METHODS}")


def purity_residuals(cov: CovarianceMatrix) -> dict:
    """Residuals of the purity conditions.

    ``rs1`` is ``max|Sigma_XX Sigma_PP - Sigma_XP^2 - (hbar^2/4) I|``, ``rs2``
    the larger of ``max|Sigma_XX Sigma_PX - Sigma_XP Sigma_XX|`` and
    ``max|Sigma_PX Sigma_PP - Sigma_PP Sigma_XP|``, ``det`` the relative
    deviation of ``det Sigma`` from ``(hbar/2)^{2n}`` and ``spectrum`` the
    largest ``|lambda_j - hbar/2|``.
    """
    h2 = 0.25 * cov.hbar**2
    xx, xp, px, pp = cov.xx, cov.xp, cov.px, cov.pp
    n = cov.n
    logdet = np.linalg.slogdet(cov.sigma)[1]
    return {
        "rs1": max_abs(xx @ pp - xp @ xp - h2 * np.eye(n)),
        "rs2": max(max_abs(xx @ px - xp @ xx), max_abs(px @ pp - pp @ xp)),
        "det": float(abs(np.expm1(logdet - 2 * n * np.log(0.5 * cov.hbar)))),
        "spectrum": float(np.max(np.abs(symplectic_eigenvalues(cov) - 0.5 * cov.hbar))),
    }


def is_pure(cov: CovarianceMatrix, tol_quant: float = TOL_QUANT) -> bool:
    """True iff every symplectic eigenvalue equals ``hbar/2`` within ``tol_quant``."""
    lam = symplectic_eigenvalues(cov)
    return bool(np.all(np.abs(lam - 0.5 * cov.hbar) <= tol_quant))


def heisenberg_check(cov: CovarianceMatrix, tol_quant: float = TOL_QUANT) -> bool:
    """Generalized Heisenberg inequality ``Sigma_XX Sigma_PP >= (hbar^2/4) I``.

    The eigenvalues are taken from the similar symmetric matrix
    ``Sigma_XX^{1/2} Sigma_PP Sigma_XX^{1/2}``.
    """
    r = matrix_sqrt_spd(cov.xx)
    w = np.linalg.eigvalsh(r @ cov.pp @ r)
    return bool(w[0] >= 0.25 * cov.hbar**2 - tol_quant)


def schur_complements(M):
    """``(M/M_PP, M/M_XX)`` for a ``2n x 2n`` block matrix."""
    A, B, C, D = blocks(M)
    return A - B @ np.linalg.solve(D, C), D - C @ np.linalg.solve(A, B)


def block_inverse(M) -> np.ndarray:
    """Inverse of an SPD block matrix through its Schur complements::

        M^{-1} = [[ (M/M_PP)^{-1},               -(M/M_PP)^{-1} M_XP M_PP^{-1}],
                  [-M_PP^{-1} M_PX (M/M_PP)^{-1},  (M/M_XX)^{-1}              ]]
    """
    A, B, C, D = blocks(M)
    s_pp, s_xx = schur_complements(M)
    try:
        inv_pp = np.linalg.inv(s_pp)
        inv_xx = np.linalg.inv(s_xx)
        D_inv = np.linalg.inv(D)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"singular Schur complement: {exc}") from exc
    upper = -inv_pp @ B @ D_inv
    R = from_blocks(inv_pp, upper, upper.T, inv_xx)
    return 0.5 * (R + R.T)


def covariance_ellipsoid(cov: CovarianceMatrix) -> PhaseSpaceEllipsoid:
    """Covariance ellipsoid as ``{M z . z <= hbar}`` with ``M = (hbar/2) Sigma^{-1}``."""
    return PhaseSpaceEllipsoid(0.5 * cov.hbar * block_inverse(cov.sigma), cov.hbar)


def ellipsoid_covariance(ellipsoid: PhaseSpaceEllipsoid) -> CovarianceMatrix:
    """Inverse of :func:`covariance_ellipsoid`: ``Sigma = (hbar/2) M^{-1}``."""
    return CovarianceMatrix(0.5 * ellipsoid.hbar * block_inverse(ellipsoid.M), ellipsoid.hbar)


def project_onto(ellipsoid: PhaseSpaceEllipsoid, which: str) -> SubspaceEllipsoid:
    """Orthogonal projection on ``l_X`` (``which="X"``) or ``l_P`` (``which="P"``).

    The shapes are the Schur complements ``M/M_PP`` and ``M/M_XX``.
    """
    if not ellipsoid.is_centered:
        raise ValidationError("projection requires a centered ellipsoid; translate first")
    s_pp, s_xx = schur_complements(ellipsoid.M)
    n = ellipsoid.n
    if which == "X":
        return SubspaceEllipsoid(coordinate_plane_X(n), s_pp, ellipsoid.hbar)
    if which == "P":
        return SubspaceEllipsoid(coordinate_plane_P(n), s_xx, ellipsoid.hbar)
    raise ValueError(f"which must be 'X' or 'P', got {which!r}")


def project_along(ellipsoid: PhaseSpaceEllipsoid, frame: LagrangianFrame) -> SubspaceEllipsoid:
    """Projection on ``frame.ell`` parallel to ``frame.ell_prime``.

    For the canonical frame this is the orthogonal projection on ``l_X``.
    """
    if not ellipsoid.is_centered:
        raise ValidationError("projection requires a centered ellipsoid; translate first")
    n = ellipsoid.n
    Z = np.hstack([basis_of(frame.ell), basis_of(frame.ell_prime)])
    Mt = Z.T @ ellipsoid.M @ Z
    shape = Mt[:n, :n] - Mt[:n, n:] @ np.linalg.solve(Mt[n:, n:], Mt[n:, :n])
    return SubspaceEllipsoid(frame.ell, shape, ellipsoid.hbar)


def ellipse_coefficients(ellipsoid: PhaseSpaceEllipsoid) -> dict:
    """Coefficients of ``a x^2 + b x p + c p^2 <= 1`` for a centered ellipse in the phase plane."""
    if ellipsoid.n != 1:
        raise DimensionError("ellipse coefficients are defined for n = 1 only")
    M = ellipsoid.M / ellipsoid.hbar
    return {"xx": float(M[0, 0]), "xp": float(2 * M[0, 1]), "pp": float(M[1, 1])}
