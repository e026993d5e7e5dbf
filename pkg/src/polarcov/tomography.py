"""Marginals of Gaussian Wigner distributions on Lagrangian planes and state reconstruction.

For a plane ``l = {A x + B p = 0}`` with normalized ``(A, B)``, the
integral of the Wigner distribution over the affine plane ``l + z``
depends on ``z`` only through ``s = A x + B p``; as a function of ``s`` it
is the normal density with mean ``N z0`` and covariance ``N Sigma N^T``,
``N = [A B]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.stats import multivariate_normal

from .covariance import CovarianceMatrix, is_pure
from .duality import john_blob
from .errors import DimensionError, NoSolutionError, ValidationError
from .lagrangian import AffineLagrangian, LagrangianFrame, LagrangianPlane, canonical_frame, frame_transport
from .linalg import check_spd, matrix_inv_sqrt_spd, matrix_sqrt_spd, max_abs, symmetrize
from .states import PureGaussian, as_covariance, covariance_to_state
from .symplectic import symplectic_inverse
from .tolerances import TOL_QUANT, TOL_TRANS

__all__ = [
    "LagrangianMarginal",
    "ReconstructionResult",
    "radon_integral",
    "marginal_on",
    "reconstruct",
    "state_from_measurement",
]


@dataclass(frozen=True, eq=False)
class LagrangianMarginal:
    """Gaussian marginal of a state on a plane, as a density in ``s = A x + B p``."""

    plane: LagrangianPlane
    cov_intrinsic: np.ndarray
    mean_intrinsic: np.ndarray
    hbar: float

    def __post_init__(self):
        n = self.plane.n
        cov = symmetrize(np.atleast_2d(np.asarray(self.cov_intrinsic, float)), name="marginal covariance")
        if cov.shape != (n, n):
            raise DimensionError(f"marginal covariance must be {n}x{n}, got {cov.shape}")
        check_spd(cov, name="marginal covariance")
        mean = (
            np.zeros(n)
            if self.mean_intrinsic is None
            else np.asarray(self.mean_intrinsic, float).reshape(n)
        )
        object.__setattr__(self, "cov_intrinsic", cov)
        object.__setattr__(self, "mean_intrinsic", mean)
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.plane.n

    def density(self, s):
        return multivariate_normal(self.mean_intrinsic, self.cov_intrinsic).pdf(s)

    def evaluate(self, z):
        """Value of the line integral over ``plane + z`` for phase space points ``z``."""
        s = np.atleast_2d(np.asarray(z, float)) @ self.plane.normal.T
        return self.density(s)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Pure states sharing two marginals (the Pauli partners)."""

    candidates: list
    frame: LagrangianFrame
    degenerate: bool = False

    def __len__(self):
        return len(self.candidates)


def marginal_on(state, plane: LagrangianPlane) -> LagrangianMarginal:
    """Marginal of a pure or mixed state on ``plane``."""
    cov, center = as_covariance(state)
    if plane.n != cov.n:
        raise DimensionError("plane and state dimensions differ")
    N = plane.normal
    return LagrangianMarginal(plane, N @ cov.sigma @ N.T, N @ center, cov.hbar)


def radon_integral(state, aff: AffineLagrangian) -> float:
    """Integral of the Wigner distribution over the affine plane ``aff``.

    ``aff.plane`` is parametrized by its orthonormal basis, so the measure
    is the Euclidean surface measure on the plane.
    """
    m = marginal_on(state, aff.plane)
    return float(m.evaluate(aff.offset)[()])


def _transported_blocks(m1, m2, S):
    """``Sigma'_XX``, ``Sigma'_PP`` and the mean of ``S^{-1}`` applied to the unknown state."""
    n = m1.n
    Si = symplectic_inverse(S)
    # the l-marginal sees p' = [0 I] S^{-1} N1^T s, the l'-marginal sees x'
    Q1 = Si[n:] @ m1.plane.normal.T
    Q2 = Si[:n] @ m2.plane.normal.T
    d = Q1 @ m1.cov_intrinsic @ Q1.T
    a = Q2 @ m2.cov_intrinsic @ Q2.T
    mean = np.concatenate([Q2 @ m2.mean_intrinsic, Q1 @ m1.mean_intrinsic])
    return 0.5 * (a + a.T), 0.5 * (d + d.T), mean


def _clusters(q, tol):
    """Group sorted eigenvalues into runs closer than ``tol``."""
    groups = [[0]]
    for i in range(1, len(q)):
        if q[i] - q[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def reconstruct(
    m1: LagrangianMarginal,
    m2: LagrangianMarginal,
    tol_quant: float = TOL_QUANT,
    tol_trans: float = TOL_TRANS,
    tol_fit: float = 1e-8,
) -> ReconstructionResult:
    """All pure Gaussian states with marginals ``m1`` on ``l`` and ``m2`` on ``l'``.

    The frame ``(l, l')`` is moved to ``(l_X, l_P)``. There the marginals fix
    ``a = Sigma'_XX`` and ``d = Sigma'_PP`` and purity leaves
    ``Sigma'_XP = -a^{1/2} Z a^{-1/2}`` with ``Z`` a symmetric square root of
    ``a^{1/2} d a^{1/2} - (hbar^2/4) I``. One sign is chosen per distinct
    nonzero eigenvalue of that matrix. When a nonzero eigenvalue is
    repeated the partners form a continuum; only the sign choices on whole
    eigenspaces are returned and ``degenerate`` is set.

    Raises
    ------
    NoSolutionError
        If ``a^{1/2} d a^{1/2} - (hbar^2/4) I`` has an eigenvalue below
        ``-tol_quant`` (the marginals violate the uncertainty principle), or
        if no candidate reproduces both marginals.
    TransversalityError
        If the two planes are not transverse.
    """
    if m1.n != m2.n:
        raise DimensionError("marginals have different dimensions")
    if m1.hbar != m2.hbar:
        raise ValidationError(f"hbar mismatch between marginals: {m1.hbar} vs {m2.hbar}")
    hbar = m1.hbar
    n = m1.n
    frame = LagrangianFrame(m1.plane, m2.plane).check(tol_trans)
    S = frame_transport(canonical_frame(n), frame, tol_trans)
    a, d, mean_t = _transported_blocks(m1, m2, S)

    ra = matrix_sqrt_spd(a)
    ra_inv = matrix_inv_sqrt_spd(a)
    core = ra @ d @ ra
    q, V = np.linalg.eigh(0.5 * (core + core.T) - 0.25 * hbar**2 * np.eye(n))
    scale = max(1.0, 0.25 * hbar**2)
    if q[0] < -tol_quant * scale:
        raise NoSolutionError(
            f"marginals are incompatible with a pure state: "
            f"a^1/2 d a^1/2 - hbar^2/4 has eigenvalue {float(q[0])!r}",
            eigenvalue=float(q[0]),
        )
    roots = np.sqrt(np.clip(q, 0.0, None))
    groups = _clusters(q, max(tol_quant * scale, 1e-8 * max(1.0, abs(q[-1]))))
    active = [g for g in groups if q[g[-1]] > tol_quant * scale]
    degenerate = any(len(g) > 1 for g in active)

    candidates = []
    for signs in itertools.product((1.0, -1.0), repeat=len(active)):
        sv = np.zeros(n)
        for sgn, g in zip(signs, active):
            sv[g] = sgn
        Z = (V * (sv * roots)) @ V.T
        c = -ra @ Z @ ra_inv
        sigma_t = np.block([[a, c], [c.T, d]])
        sigma = S @ sigma_t @ S.T
        cov = CovarianceMatrix(0.5 * (sigma + sigma.T), hbar)
        if not is_pure(cov, tol_quant=max(tol_quant, 1e-8 * scale)):
            continue
        state = covariance_to_state(cov, S @ mean_t, tol_quant=max(tol_quant, 1e-8 * scale))
        if _fits(state, m1, tol_fit) and _fits(state, m2, tol_fit):
            candidates.append(state)
    if not candidates:
        raise NoSolutionError("no pure state reproduces both marginals")
    return ReconstructionResult(candidates, frame, degenerate)


def _fits(state: PureGaussian, m: LagrangianMarginal, tol) -> bool:
    got = marginal_on(state, m.plane)
    ref = max(1.0, max_abs(m.cov_intrinsic))
    return (
        max_abs(got.cov_intrinsic - m.cov_intrinsic) <= tol * ref
        and max_abs(got.mean_intrinsic - m.mean_intrinsic) <= tol * max(1.0, max_abs(m.mean_intrinsic))
    )


def state_from_measurement(x_ell, frame: LagrangianFrame, tol_trans: float = TOL_TRANS) -> PureGaussian:
    """Pure state whose covariance ellipsoid is the John blob of ``X_l x (X_l)^hbar_{l'}``."""
    blob = john_blob(x_ell, frame, tol_trans)
    return covariance_to_state(blob.covariance(), tol_quant=max(TOL_QUANT, 1e-9 * x_ell.hbar))
