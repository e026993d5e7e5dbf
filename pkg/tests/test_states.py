import numpy as np
import pytest
from scipy import integrate

import oracles
from polarcov.covariance import CovarianceMatrix, is_pure, symplectic_eigenvalues
from polarcov.errors import DimensionError, PurityError, ValidationError
from polarcov.states import (
    MixedGaussian,
    PureGaussian,
    apply_symplectic,
    as_covariance,
    covariance_to_state,
    fiducial,
    marginal_densities,
    random_pure,
    state_to_covariance,
    wigner_density,
    wigner_factor,
    wigner_shape,
)
from polarcov.symplectic import generator_ML, is_symplectic, random_symplectic

S3 = np.sqrt(3) / 2


def _same_state(a, b, tol=1e-9):
    return (
        np.max(np.abs(a.X - b.X)) <= tol
        and np.max(np.abs(a.Y - b.Y)) <= tol
        and np.max(np.abs(a.center - b.center)) <= tol
    )


def test_state_validation():
    with pytest.raises(ValueError):
        PureGaussian([[-1.0]], [[0.0]], 1.0)
    with pytest.raises(DimensionError):
        PureGaussian(np.eye(2), np.zeros((1, 1)), 1.0)
    with pytest.raises(ValidationError):
        PureGaussian([[1.0]], [[0.0]], -1.0)
    with pytest.raises(DimensionError):
        PureGaussian([[1.0]], [[0.0]], 1.0, center=[0.0])


def test_wigner_shape_examples():
    assert np.allclose(wigner_shape(fiducial(3, 1.0)), np.eye(6))
    G = wigner_shape(PureGaussian([[2.0]], [[1.0]], 1.0))
    assert np.allclose(G, [[2.5, 0.5], [0.5, 0.5]])
    assert np.linalg.det(G) == pytest.approx(1.0)


def test_wigner_shape_matches_oracle():
    for seed in range(10):
        s = random_pure(1 + seed % 3, 1.0, seed)
        G = wigner_shape(s)
        assert np.allclose(G, oracles.pure_G(s.X, s.Y), atol=1e-10)
        S = wigner_factor(s)
        assert np.max(np.abs(S.T @ S - G)) <= 1e-10 * max(1.0, np.max(np.abs(G)))
        assert is_symplectic(G, tol=1e-9) and np.linalg.eigvalsh(G)[0] > 0


def test_wigner_density_matches_definition():
    rng = np.random.default_rng(3)
    s = random_pure(2, 0.7, rng)
    s = PureGaussian(s.X, s.Y, s.hbar, center=rng.standard_normal(4))
    for z in rng.standard_normal((5, 4)):
        ref = oracles.pure_wigner(z, s.X, s.Y, s.hbar, s.center)
        assert wigner_density(s, z) == pytest.approx(ref, rel=1e-10)


def test_state_to_covariance_examples():
    hbar = 1.0
    assert np.allclose(state_to_covariance(fiducial(2, hbar)).sigma, 0.5 * hbar * np.eye(4))
    s = PureGaussian([[2.0]], [[1.0]], hbar)
    cov = state_to_covariance(s)
    assert np.allclose(cov.sigma, 0.5 * hbar * np.linalg.inv([[2.5, 0.5], [0.5, 0.5]]))
    assert cov.xx[0, 0] == pytest.approx(hbar / 4)
    assert 0.5 * hbar / cov.xx[0, 0] == pytest.approx(2.0)
    assert is_pure(cov)


def test_covariance_to_state_examples():
    s = covariance_to_state(CovarianceMatrix(np.eye(4), 2.0))
    assert np.allclose(s.X, np.eye(2)) and np.allclose(s.Y, 0)
    s = covariance_to_state(CovarianceMatrix(np.array([[1.0, S3], [S3, 1.0]]), 1.0))
    assert s.X[0, 0] == pytest.approx(0.5)
    assert s.Y[0, 0] == pytest.approx(-S3)


def test_covariance_round_trip():
    for seed in range(20):
        s = random_pure(1 + seed % 3, [0.5, 1.0, 2.0][seed % 3], seed)
        assert _same_state(covariance_to_state(state_to_covariance(s)), s, 1e-9)
        cov = state_to_covariance(s)
        back = state_to_covariance(covariance_to_state(cov))
        assert np.max(np.abs(back.sigma - cov.sigma)) <= 1e-9 * np.max(np.abs(cov.sigma))


def test_Y_symmetric_before_symmetrization():
    for seed in range(50):
        cov = state_to_covariance(random_pure(3, 1.0, seed))
        Y = -cov.px @ np.linalg.inv(cov.xx)
        assert np.max(np.abs(Y - Y.T)) <= 1e-9


def test_covariance_to_state_rejects_mixed():
    with pytest.raises(PurityError, match="1.0"):
        covariance_to_state(CovarianceMatrix(np.eye(2), 1.0))


def test_apply_symplectic_examples():
    s = random_pure(2, 1.0, 4)
    assert _same_state(apply_symplectic(s, np.eye(4)), s)
    out = apply_symplectic(fiducial(1, 1.0), generator_ML([[2.0]]))
    assert np.allclose(out.X, [[4.0]]) and np.allclose(out.Y, 0)
    back = apply_symplectic(s, wigner_factor(s))
    assert np.allclose(wigner_shape(back), np.eye(4), atol=1e-10)


def test_apply_symplectic_moves_center():
    s = PureGaussian(np.eye(1), np.zeros((1, 1)), 1.0, center=[1.0, 2.0])
    S = np.array([[2.0, 0.0], [0.0, 0.5]])
    assert np.allclose(apply_symplectic(s, S).center, [2.0, 1.0])


def test_group_action_and_purity_preservation():
    rng = np.random.default_rng(5)
    for _ in range(10):
        s = random_pure(2, 1.0, rng)
        S1, S2 = random_symplectic(2, rng), random_symplectic(2, rng)
        a = state_to_covariance(apply_symplectic(apply_symplectic(s, S1), S2)).sigma
        b = state_to_covariance(apply_symplectic(s, S2 @ S1)).sigma
        assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))
        assert is_pure(CovarianceMatrix(a, 1.0))


def test_mixed_state_action():
    cov = CovarianceMatrix(np.diag([1.0, 2.0, 1.0, 2.0]), 1.0)
    m = MixedGaussian(cov)
    S = random_symplectic(2, 2)
    out = apply_symplectic(m, S)
    assert isinstance(out, MixedGaussian)
    lam = symplectic_eigenvalues(out.cov)
    assert np.allclose(lam, [2.0, 1.0])


def test_mixed_requires_quantum():
    with pytest.raises(ValidationError):
        MixedGaussian(CovarianceMatrix(0.1 * np.eye(2), 1.0))
    with pytest.raises(TypeError):
        as_covariance(np.eye(2))


def test_marginal_examples():
    hbar = 1.5
    px, pp = marginal_densities(fiducial(2, hbar))
    assert np.allclose(px.cov, 0.5 * hbar * np.eye(2)) and np.allclose(pp.cov, 0.5 * hbar * np.eye(2))
    cov = CovarianceMatrix(np.array([[1.0, S3], [S3, 1.0]]), 1.0)
    s = covariance_to_state(cov)
    mx, mp = marginal_densities(s)
    assert mx.cov[0, 0] == pytest.approx(1.0) and mp.cov[0, 0] == pytest.approx(1.0)


def test_marginal_covariances_are_blocks():
    s = random_pure(3, 1.0, 8)
    cov = state_to_covariance(s)
    mx, mp = marginal_densities(s)
    assert np.array_equal(mx.cov, cov.xx) and np.array_equal(mp.cov, cov.pp)


def test_position_marginal_by_quadrature():
    s = random_pure(1, 1.0, 11)
    s = PureGaussian(s.X, s.Y, s.hbar, center=[0.3, -0.2])
    cov, center = as_covariance(s)
    mx, _ = marginal_densities(s)
    sd = np.sqrt(cov.pp[0, 0])
    for x in np.linspace(-1.5, 1.5, 5):
        f = lambda p: oracles.pure_wigner([x, p], s.X, s.Y, s.hbar, s.center)
        val, _ = integrate.quad(f, center[1] - 12 * sd, center[1] + 12 * sd, epsabs=0, epsrel=1e-11)
        assert val == pytest.approx(mx.pdf(x), rel=1e-8)


def test_random_pure_deterministic():
    a, b = random_pure(3, 1.0, 42), random_pure(3, 1.0, 42)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.Y, b.Y)


def test_random_pure_sweep():
    for seed in range(1000):
        s = random_pure(1 + seed % 3, 1.0, seed)
        assert np.linalg.det(wigner_shape(s)) == pytest.approx(1.0, abs=1e-8)
        assert is_pure(state_to_covariance(s))
