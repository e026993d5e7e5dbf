"""Pure and mixed Gaussian states at the level of covariance data.

A pure centered Gaussian is described by ``X`` (SPD) and ``Y`` (symmetric);
its Wigner distribution is ``(pi hbar)^{-n} exp(-G z . z / hbar)`` with

    G = [[X + Y X^{-1} Y, Y X^{-1}],
         [X^{-1} Y,       X^{-1}  ]].

The covariance matrix is ``Sigma = (hbar/2) G^{-1}``. Global phases are
not tracked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import multivariate_normal

from .covariance import CovarianceMatrix, is_quantum, symplectic_eigenvalues
from .errors import DimensionError, PurityError, ValidationError
from .linalg import (
    check_spd,
    from_blocks,
    matrix_inv_sqrt_spd,
    matrix_sqrt_spd,
    max_abs,
    random_spd,
    random_symmetric,
    spd_inverse,
    symmetrize,
)
from .symplectic import generator_ML, generator_VP, standard_J
from .tolerances import TOL_QUANT, TOL_SYMP

__all__ = [
    "PureGaussian",
    "MixedGaussian",
    "GaussianDensity",
    "wigner_shape",
    "wigner_factor",
    "wigner_density",
    "state_to_covariance",
    "covariance_to_state",
    "apply_symplectic",
    "marginal_densities",
    "random_pure",
    "fiducial",
    "as_covariance",
]


def _center(center, n):
    c = np.zeros(2 * n) if center is None else np.asarray(center, dtype=float).copy()
    if c.shape != (2 * n,):
        raise DimensionError(f"center must have length {2 * n}, got shape {c.shape}")
    return c


@dataclass(frozen=True, eq=False)
class PureGaussian:
    """Pure Gaussian state with parameters ``(X, Y)`` and center ``z0``."""

    X: np.ndarray
    Y: np.ndarray
    hbar: float
    center: np.ndarray = None

    def __post_init__(self):
        X = symmetrize(np.atleast_2d(np.asarray(self.X, float)), TOL_SYMP, "X")
        Y = symmetrize(np.atleast_2d(np.asarray(self.Y, float)), TOL_SYMP, "Y")
        if X.shape != Y.shape:
            raise DimensionError(f"X and Y shapes differ: {X.shape} vs {Y.shape}")
        check_spd(X, name="X")
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "hbar", float(self.hbar))
        object.__setattr__(self, "center", _center(self.center, X.shape[0]))

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True, eq=False)
class MixedGaussian:
    """Gaussian state given by a quantum covariance matrix and a center."""

    cov: CovarianceMatrix
    center: np.ndarray = None
    tol_quant: float = field(default=TOL_QUANT, repr=False)

    def __post_init__(self):
        verdict = is_quantum(self.cov, tol_quant=self.tol_quant)
        if not verdict:
            raise ValidationError(
                f"covariance matrix violates the uncertainty principle "
                f"(min symplectic eigenvalue - hbar/2 = {verdict.margin:.3e})"
            )
        object.__setattr__(self, "center", _center(self.center, self.cov.n))

    @property
    def n(self) -> int:
        return self.cov.n

    @property
    def hbar(self) -> float:
        return self.cov.hbar


@dataclass(frozen=True, eq=False)
class GaussianDensity:
    """Normal density with the given mean and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def pdf(self, x):
        return multivariate_normal(self.mean, self.cov).pdf(x)


def fiducial(n: int, hbar: float) -> PureGaussian:
    """The standard Gaussian, ``X = I``, ``Y = 0``."""
    return PureGaussian(np.eye(n), np.zeros((n, n)), hbar)


def wigner_shape(state: PureGaussian) -> np.ndarray:
    """The symmetric symplectic matrix ``G`` of the Wigner distribution."""
    X, Y = state.X, state.Y
    Xi = spd_inverse(X)
    YXi = Y @ Xi
    G = from_blocks(X + YXi @ Y, YXi, YXi.T, Xi)
    return 0.5 * (G + G.T)


def wigner_factor(state: PureGaussian) -> np.ndarray:
    """``S = [[X^{1/2}, 0], [X^{-1/2} Y, X^{-1/2}]]``, so that ``G = S^T S``.

    ``S`` maps the state to the fiducial state.
    """
    r = matrix_sqrt_spd(state.X)
    ri = matrix_inv_sqrt_spd(state.X)
    return from_blocks(r, np.zeros_like(r), ri @ state.Y, ri)


def state_to_covariance(state: PureGaussian) -> CovarianceMatrix:
    """``Sigma = (hbar/2) G^{-1}``, using ``G^{-1} = -J G J``."""
    J = standard_J(state.n)
    return CovarianceMatrix(-0.5 * state.hbar * (J @ wigner_shape(state) @ J), state.hbar)


def covariance_to_state(
    cov: CovarianceMatrix, center=None, tol_quant: float = TOL_QUANT, tol_asym: float = 1e-8
) -> PureGaussian:
    """Pure state with covariance ``cov``: ``X = (hbar/2) Sigma_XX^{-1}``, ``Y = -Sigma_PX Sigma_XX^{-1}``.

    Raises
    ------
    PurityError
        If some symplectic eigenvalue differs from ``hbar/2`` by more than
        ``tol_quant``, or if ``Y`` comes out asymmetric beyond ``tol_asym``
        (relative).
    """
    lam = symplectic_eigenvalues(cov)
    j = int(np.argmax(np.abs(lam - 0.5 * cov.hbar)))
    if abs(lam[j] - 0.5 * cov.hbar) > tol_quant:
        raise PurityError(
            f"covariance is not pure: symplectic eigenvalue {float(lam[j])!r} differs from "
            f"hbar/2 = {0.5 * cov.hbar!r}"
        )
    xx_inv = spd_inverse(cov.xx)
    X = 0.5 * cov.hbar * xx_inv
    Y = -cov.px @ xx_inv
    asym = max_abs(Y - Y.T)
    if asym > tol_asym * max(1.0, max_abs(Y)):
        raise PurityError(f"Sigma_PX Sigma_XX^-1 is not symmetric (asymmetry {asym:.3e})")
    return PureGaussian(X, 0.5 * (Y + Y.T), cov.hbar, center)


def as_covariance(state):
    """``(CovarianceMatrix, center)`` of a pure or mixed state."""
    if isinstance(state, PureGaussian):
        return state_to_covariance(state), state.center
    if isinstance(state, MixedGaussian):
        return state.cov, state.center
    raise TypeError(f"expected PureGaussian or MixedGaussian, got {type(state).__name__}")


def apply_symplectic(state, S):
    """Push a state forward by ``S``: ``Sigma -> S Sigma S^T``, ``z0 -> S z0``."""
    S = np.asarray(S, dtype=float)
    cov, center = as_covariance(state)
    new = cov.transformed(S)
    if isinstance(state, PureGaussian):
        return covariance_to_state(new, S @ center)
    return MixedGaussian(new, S @ center)


def wigner_density(state, z) -> np.ndarray:
    """Wigner distribution evaluated at points ``z`` (rows)."""
    cov, center = as_covariance(state)
    return multivariate_normal(center, cov.sigma).pdf(z)


def marginal_densities(state):
    """Position and momentum marginals, with covariances ``Sigma_XX`` and ``Sigma_PP``."""
    cov, center = as_covariance(state)
    n = cov.n
    return GaussianDensity(center[:n], cov.xx), GaussianDensity(center[n:], cov.pp)


def random_pure(n: int, hbar: float, seed=None, n_factors: int = 6) -> PureGaussian:
    """Fiducial state pushed through a random product of ``V_P``, ``M_L`` and ``J``.

    ``P`` has eigenvalues in ``[-1, 1]`` and ``L`` a log-spectrum in
    ``[-1, 1]``, so the condition number stays bounded.
    """
    rng = np.random.default_rng(seed)
    S = np.eye(2 * n)
    for _ in range(n_factors):
        kind = rng.integers(3)
        if kind == 0:
            G = generator_VP(random_symmetric(n, rng))
        elif kind == 1:
            G = generator_ML(random_spd(n, rng))
        else:
            G = standard_J(n)
        S = S @ G
    return covariance_to_state(CovarianceMatrix(0.5 * hbar * (S @ S.T), hbar))
