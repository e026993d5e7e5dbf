import numpy as np
import pytest
from scipy import integrate

import oracles
from polarcov.covariance import (
    CovarianceMatrix,
    SubspaceEllipsoid,
    covariance_ellipsoid,
    is_pure,
    project_along,
)
from polarcov.duality import is_fixed_point
from polarcov.errors import NoSolutionError, TransversalityError, ValidationError
from polarcov.lagrangian import (
    AffineLagrangian,
    canonical_frame,
    coordinate_plane_P,
    coordinate_plane_X,
    line,
    random_frame,
    random_plane,
)
from polarcov.linalg import random_spd
from polarcov.states import (
    MixedGaussian,
    PureGaussian,
    as_covariance,
    fiducial,
    random_pure,
    state_to_covariance,
    wigner_density,
)
from polarcov.tomography import (
    LagrangianMarginal,
    marginal_on,
    radon_integral,
    reconstruct,
    state_from_measurement,
)

S3 = np.sqrt(3) / 2


def _pair(sxx, spp, hbar=1.0):
    """Marginals on ``l_X`` (momentum data) and ``l_P`` (position data)."""
    m1 = LagrangianMarginal(coordinate_plane_X(1), [[spp]], None, hbar)
    m2 = LagrangianMarginal(coordinate_plane_P(1), [[sxx]], None, hbar)
    return m1, m2


def _contains(candidates, state, tol):
    return any(
        np.max(np.abs(c.X - state.X)) <= tol and np.max(np.abs(c.Y - state.Y)) <= tol for c in candidates
    )


@pytest.mark.parametrize("hbar", [0.5, 1.0, 2.0])
def test_radon_fiducial(hbar):
    s = fiducial(1, hbar)
    for x, p in [(0.0, 0.0), (0.3, 0.7), (-1.2, 0.4)]:
        z = np.array([x, p])
        # integrating over p at fixed x gives |phi_0(x)|^2
        val = radon_integral(s, AffineLagrangian(coordinate_plane_P(1), z))
        assert val == pytest.approx(np.exp(-x**2 / hbar) / np.sqrt(np.pi * hbar), rel=1e-12)
        val = radon_integral(s, AffineLagrangian(coordinate_plane_X(1), z))
        assert val == pytest.approx(np.exp(-p**2 / hbar) / np.sqrt(np.pi * hbar), rel=1e-12)


def test_radon_n1_quadrature():
    rng = np.random.default_rng(1)
    for _ in range(5):
        s = random_pure(1, 1.0, rng)
        s = PureGaussian(s.X, s.Y, s.hbar, center=0.3 * rng.standard_normal(2))
        plane = random_plane(1, rng)
        z = 0.5 * rng.standard_normal(2)
        T = plane.basis
        cov, center = as_covariance(s)
        c = T.T @ (center - z)
        h = 12 * np.sqrt(np.linalg.eigvalsh(cov.sigma)[-1])
        ref = oracles.plane_integral(lambda w: wigner_density(s, w), T, z, (c, [h]))
        assert radon_integral(s, AffineLagrangian(plane, z)) == pytest.approx(ref, rel=1e-8)


def test_radon_n2_quadrature():
    rng = np.random.default_rng(2)
    s = random_pure(2, 1.0, rng)
    plane = random_plane(2, rng)
    z = 0.3 * rng.standard_normal(4)
    T = plane.basis
    cov, center = as_covariance(s)
    h = 10 * np.sqrt(np.linalg.eigvalsh(T.T @ cov.sigma @ T)[-1]) * np.ones(2)
    ref = oracles.plane_integral(lambda w: oracles.pure_wigner(w, s.X, s.Y, s.hbar, s.center), T, z,
                                 (T.T @ (center - z), h))
    assert radon_integral(s, AffineLagrangian(plane, z)) == pytest.approx(ref, rel=1e-7)


def test_radon_mixed_state():
    cov = CovarianceMatrix(np.diag([1.0, 2.0]), 1.0)
    m = MixedGaussian(cov, center=[0.5, 0.0])
    val = radon_integral(m, AffineLagrangian(coordinate_plane_P(1), np.array([0.5, 3.0])))
    assert val == pytest.approx(1 / np.sqrt(2 * np.pi))


def test_radon_normalized():
    s = random_pure(1, 1.0, 5)
    plane = line(0.7)
    N = plane.normal[0]
    f = lambda v: radon_integral(s, AffineLagrangian(plane, v * N))
    total, _ = integrate.quad(f, -30, 30, epsabs=0, epsrel=1e-10, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_marginal_on_coordinate_planes():
    s = random_pure(2, 1.0, 7)
    cov = state_to_covariance(s)
    assert np.allclose(marginal_on(s, coordinate_plane_P(2)).cov_intrinsic, cov.xx)
    assert np.allclose(marginal_on(s, coordinate_plane_X(2)).cov_intrinsic, cov.pp)


def test_marginal_on_rotated_line():
    s = random_pure(1, 1.0, 9)
    cov, _ = as_covariance(s)
    theta = 0.6
    plane = line(np.tan(theta))  # direction (cos, sin); density in the orthogonal direction u
    u = np.array([-np.sin(theta), np.cos(theta)])
    m = marginal_on(s, plane)
    assert m.cov_intrinsic[0, 0] == pytest.approx(u @ cov.sigma @ u, rel=1e-12)
    v = 0.4
    T = plane.basis
    ref = oracles.plane_integral(lambda w: wigner_density(s, w), T, v * u, ([0.0], [15.0]))
    assert m.evaluate(v * u)[()] == pytest.approx(ref, rel=1e-8)


def test_marginal_evaluate_matches_radon():
    rng = np.random.default_rng(10)
    s = random_pure(3, 1.0, rng)
    plane = random_plane(3, rng)
    m = marginal_on(s, plane)
    for z in rng.standard_normal((5, 6)):
        assert m.evaluate(z)[()] == pytest.approx(radon_integral(s, AffineLagrangian(plane, z)), rel=1e-12)


def test_reconstruct_pauli_pair():
    res = reconstruct(*_pair(1.0, 1.0))
    assert len(res) == 2 and not res.degenerate
    sxp = sorted(state_to_covariance(c).xp[0, 0] for c in res.candidates)
    assert np.allclose(sxp, [-S3, S3])
    ys = sorted(c.Y[0, 0] for c in res.candidates)
    assert ys[0] == pytest.approx(-ys[1])


@pytest.mark.parametrize("hbar", [0.5, 1.0, 3.0])
def test_reconstruct_saturated(hbar):
    sxx = 0.8
    res = reconstruct(*_pair(sxx, 0.25 * hbar**2 / sxx, hbar))
    assert len(res) == 1
    assert state_to_covariance(res.candidates[0]).xp[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_reconstruct_no_solution():
    with pytest.raises(NoSolutionError) as info:
        reconstruct(*_pair(0.25, 0.25))
    assert info.value.eigenvalue == pytest.approx(0.0625 - 0.25)
    assert "-0.1875" in str(info.value)


def test_reconstruct_errors():
    m = LagrangianMarginal(coordinate_plane_X(1), [[1.0]], None, 1.0)
    with pytest.raises(TransversalityError):
        reconstruct(m, LagrangianMarginal(line(0.0), [[1.0]], None, 1.0))
    with pytest.raises(ValidationError):
        reconstruct(m, LagrangianMarginal(coordinate_plane_P(1), [[1.0]], None, 2.0))


def test_reconstruct_degenerate_flag():
    m1 = LagrangianMarginal(coordinate_plane_X(2), np.eye(2), None, 1.0)
    m2 = LagrangianMarginal(coordinate_plane_P(2), np.eye(2), None, 1.0)
    res = reconstruct(m1, m2)
    assert res.degenerate and len(res) == 2
    for c in res.candidates:
        assert np.allclose(np.abs(state_to_covariance(c).xp), S3 * np.eye(2))


@pytest.mark.parametrize("seed", range(12))
def test_reconstruct_round_trip(seed):
    rng = np.random.default_rng(50 + seed)
    n = 1 + seed % 3
    s = random_pure(n, 1.0, rng)
    s = PureGaussian(s.X, s.Y, s.hbar, center=rng.standard_normal(2 * n))
    frame = random_frame(n, rng)
    res = reconstruct(marginal_on(s, frame.ell), marginal_on(s, frame.ell_prime))
    assert _contains(res.candidates, s, 1e-7)
    for c in res.candidates:
        assert is_pure(state_to_covariance(c), tol_quant=1e-8)
        assert np.allclose(c.center, s.center, atol=1e-8)
    if n == 1:
        assert len(res) in (1, 2)


def test_state_from_measurement_examples():
    hbar = 1.0
    ball = SubspaceEllipsoid(coordinate_plane_X(2), np.eye(2), hbar)
    s = state_from_measurement(ball, canonical_frame(2))
    assert np.allclose(s.X, np.eye(2)) and np.allclose(s.Y, 0)
    sxx = 1.7
    interval = SubspaceEllipsoid(coordinate_plane_X(1), [[hbar / (2 * sxx)]], hbar)
    cov = state_to_covariance(state_from_measurement(interval, canonical_frame(1)))
    assert cov.xx[0, 0] == pytest.approx(sxx)
    assert cov.pp[0, 0] == pytest.approx(0.25 * hbar**2 / sxx)
    assert cov.xp[0, 0] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("seed", range(6))
def test_state_from_measurement_consistency(seed):
    rng = np.random.default_rng(200 + seed)
    n = 1 + seed % 3
    frame = random_frame(n, rng)
    X = SubspaceEllipsoid(frame.ell, random_spd(n, rng), 0.9)
    s = state_from_measurement(X, frame)
    omega = covariance_ellipsoid(state_to_covariance(s))
    assert is_fixed_point(omega)
    assert project_along(omega, frame).same_as(X, rtol=1e-9)


def test_marginal_validation():
    with pytest.raises(ValueError):
        LagrangianMarginal(coordinate_plane_X(2), np.eye(3), None, 1.0)
    with pytest.raises(ValueError):
        LagrangianMarginal(coordinate_plane_X(1), [[-1.0]], None, 1.0)
    m = LagrangianMarginal(coordinate_plane_X(1), [[1.0]], [0.5], 1.0)
    assert m.mean_intrinsic.shape == (1,)
    assert m.evaluate([0.0, 0.5])[()] == pytest.approx(1 / np.sqrt(2 * np.pi))
