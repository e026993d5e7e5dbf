import itertools

import numpy as np
import pytest

import oracles
from polarcov.errors import DimensionError, TransversalityError, ValidationError
from polarcov.lagrangian import (
    AffineLagrangian,
    LagrangianFrame,
    LagrangianPlane,
    basis_of,
    canonical_frame,
    coordinate_plane,
    coordinate_plane_P,
    coordinate_plane_X,
    frame_transport,
    line,
    plane_image,
    random_frame,
    random_plane,
    symplectic_basis,
)
from polarcov.linalg import random_orthogonal, subspace_distance
from polarcov.symplectic import is_symplectic, random_symplectic, standard_J


def _images_match(S, src, dst, tol=1e-8):
    return plane_image(S, src).same_as(dst, tol)


def test_coordinate_planes_n1():
    X = coordinate_plane_X(1)
    assert X.contains([1.0, 0.0]) and not X.contains([0.0, 1.0])
    P = coordinate_plane_P(1)
    assert P.contains([0.0, 1.0]) and not P.contains([1.0, 0.0])


def test_coordinate_plane_X_basis_n2():
    T = basis_of(coordinate_plane_X(2))
    # spans e_x1, e_x2 (the stored orientation is -I on the x block)
    assert subspace_distance(T, np.eye(4)[:, :2]) <= 1e-15
    assert np.array_equal(np.abs(T), np.eye(4)[:, :2])


def test_coordinate_plane_P_basis():
    T = basis_of(coordinate_plane_P(2))
    assert np.array_equal(T, np.vstack([np.zeros((2, 2)), np.eye(2)]))


@pytest.mark.parametrize("n", range(1, 5))
def test_omega_vanishes_on_coordinate_planes(n):
    rng = np.random.default_rng(n)
    for plane in (coordinate_plane_X(n), coordinate_plane_P(n)):
        T = plane.basis
        for _ in range(10):
            u, v = rng.standard_normal((2, n))
            assert oracles.omega(T @ u, T @ v) == pytest.approx(0.0, abs=1e-14)


def test_coordinate_plane_extremes():
    assert coordinate_plane(3, ()).same_as(coordinate_plane_X(3))
    assert coordinate_plane(3, range(3)).same_as(coordinate_plane_P(3))


def test_coordinate_plane_mixed():
    # zero-based index 1 frees p_2
    plane = coordinate_plane(2, {1})
    e = np.eye(4)
    assert plane.contains(e[0]) and plane.contains(e[3])
    assert not plane.contains(e[1]) and not plane.contains(e[2])


@pytest.mark.parametrize("n", range(1, 5))
def test_all_coordinate_planes_valid(n):
    for k in range(n + 1):
        for alpha in itertools.combinations(range(n), k):
            res = coordinate_plane(n, alpha).invariant_residuals()
            assert max(res.values()) <= 1e-12, (alpha, res)


def test_coordinate_plane_out_of_range():
    with pytest.raises(DimensionError):
        coordinate_plane(2, {2})


def test_from_equations_normalizes():
    plane = LagrangianPlane.from_equations([[3.0]], [[-3.0]])
    assert max(plane.invariant_residuals().values()) <= 1e-14
    assert plane.same_as(line(1.0))


def test_from_equations_rejects_bad_input():
    with pytest.raises(ValidationError):
        LagrangianPlane.from_equations(np.zeros((2, 2)), [[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        # x1 + p2 = 0, x2 = 0 is not isotropic
        LagrangianPlane.from_equations([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(DimensionError):
        LagrangianPlane.from_equations(np.eye(2), np.eye(3))


def test_from_basis_rejects_non_lagrangian():
    T = np.eye(4)[:, [0, 2]]  # x1 and p1 directions
    with pytest.raises(ValidationError):
        LagrangianPlane.from_basis(T)


def test_parametrization_solves_equations():
    rng = np.random.default_rng(5)
    plane = random_plane(3, rng)
    z0 = rng.standard_normal(6)
    aff = AffineLagrangian(plane, z0)
    for u in rng.standard_normal((100, 3)):
        z = aff.point(u) - z0
        x, p = z[:3], z[3:]
        assert np.max(np.abs(plane.A @ x + plane.B @ p)) <= 1e-12


def test_basis_orthonormal():
    plane = random_plane(4, 9)
    T = plane.basis
    assert np.allclose(T.T @ T, np.eye(4), atol=1e-12)
    assert np.max(np.abs(T.T @ standard_J(4) @ T)) <= 1e-12


def test_reparametrization_invariance():
    rng = np.random.default_rng(11)
    for _ in range(20):
        plane = random_plane(3, rng)
        H = random_orthogonal(3, rng)
        other = LagrangianPlane.from_equations(H @ plane.A, H @ plane.B)
        assert subspace_distance(plane.basis, other.basis) <= 1e-9


def test_dual_plane_is_orthogonal_complement():
    plane = random_plane(2, 4)
    d = plane.dual_plane()
    assert np.allclose(plane.basis.T @ d.basis, 0, atol=1e-12)
    assert d.same_as(plane_image(standard_J(2), plane))


def test_plane_image_examples():
    X = coordinate_plane_X(2)
    assert plane_image(np.eye(4), X).same_as(X)
    assert plane_image(standard_J(2), X).same_as(coordinate_plane_P(2))


def test_plane_image_stays_lagrangian():
    rng = np.random.default_rng(8)
    for _ in range(20):
        S = random_symplectic(3, rng)
        img = plane_image(S, random_plane(3, rng))
        T = img.basis
        assert np.max(np.abs(T.T @ standard_J(3) @ T)) <= 1e-10


def test_transversality():
    with pytest.raises(TransversalityError):
        LagrangianFrame(coordinate_plane_X(1), line(0.0)).check()
    assert canonical_frame(2).transversality() == pytest.approx(1.0)
    # p = x meets l_X at 45 degrees
    s = LagrangianFrame(coordinate_plane_X(1), line(1.0)).transversality()
    assert s == pytest.approx(np.sqrt(2) * np.sin(np.pi / 8))


def test_symplectic_basis_is_symplectic():
    frame = random_frame(3, 2)
    Z = symplectic_basis(frame)
    assert is_symplectic(Z, tol=1e-9)
    assert _images_match(Z, coordinate_plane_X(3), frame.ell)
    assert _images_match(Z, coordinate_plane_P(3), frame.ell_prime)


def test_transport_identity_frame():
    c = canonical_frame(2)
    S = frame_transport(c, c)
    assert is_symplectic(S)
    assert _images_match(S, c.ell, c.ell) and _images_match(S, c.ell_prime, c.ell_prime)
    assert np.allclose(S[:2, 2:], 0) and np.allclose(S[2:, :2], 0)


def test_transport_swap():
    c = canonical_frame(2)
    S = frame_transport(c, LagrangianFrame(c.ell_prime, c.ell))
    assert _images_match(S, c.ell, c.ell_prime) and _images_match(S, c.ell_prime, c.ell)


@pytest.mark.parametrize("seed", range(10))
def test_transport_random_frames(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    src, dst = random_frame(n, rng), random_frame(n, rng)
    S = frame_transport(src, dst)
    assert is_symplectic(S, tol=1e-9)
    assert _images_match(S, src.ell, dst.ell) and _images_match(S, src.ell_prime, dst.ell_prime)


def test_transport_composition():
    rng = np.random.default_rng(21)
    F0, F1, F2 = (random_frame(2, rng) for _ in range(3))
    S = frame_transport(F1, F2) @ frame_transport(F0, F1)
    assert _images_match(S, F0.ell, F2.ell) and _images_match(S, F0.ell_prime, F2.ell_prime)


def test_frame_split():
    frame = random_frame(2, 6)
    z = np.arange(4.0)
    a, b = frame.split(z)
    assert np.allclose(frame.ell.basis @ a + frame.ell_prime.basis @ b, z)
