import numpy as np
import pytest

from nkcp3.linear_model import (canonical_theta, cr_criterion, is_special_lagrangian_subspace,
                                jk_orthogonal_residual, lin_omega_v, orthonormalize, random_h,
                                random_su3, stabilizer_algebra, stabilizer_algebra_dim,
                                t_theta, u1_representative, v_theta, w_theta)


def vertical_form_norm(W):
    Q = orthonormalize(W)
    M = np.array([[lin_omega_v(Q[:, a], Q[:, b]) for b in range(3)] for a in range(3)])
    return np.linalg.norm(M, 2)


def test_t_theta_is_unitary_with_unit_determinant_volume():
    for th in np.linspace(0, np.pi / 2, 7):
        T = t_theta(th)
        assert np.abs(T.conj().T @ T - np.eye(3)).max() < 1e-14
        ok, res = is_special_lagrangian_subspace(T)
        assert ok, res


def test_vertical_form_on_w_theta():
    for th in np.linspace(0, np.pi / 4, 50):
        assert abs(vertical_form_norm(w_theta(th)) - 0.5 * abs(np.cos(2 * th))) < 1e-10


def test_canonical_theta_round_trip_and_invariance():
    rng = np.random.default_rng(0)
    for th in (0.0, 0.2, 0.5, np.pi / 4 - 1e-3):
        W = w_theta(th)
        cf = canonical_theta(W)
        assert abs(cf.theta - th) < 1e-9
        assert abs(cf.half_abs_cos2theta - 0.5 * abs(np.cos(2 * th))) < 1e-9 or cf.n_w == 2
        for _ in range(20):
            g = random_h(rng)
            A = rng.normal(size=(3, 3))  # change of real basis
            assert abs(canonical_theta(g @ W @ A).theta - th) < 1e-9


def test_theta_folds_into_fundamental_range():
    assert abs(canonical_theta(w_theta(1.2)).theta - (np.pi / 2 - 1.2)) < 1e-9


def test_standard_real_plane():
    cf = canonical_theta(np.eye(3, dtype=complex))
    assert abs(cf.theta - np.pi / 4) < 1e-12 and cf.n_w == 2


def test_non_special_lagrangian_and_degenerate_input():
    B = np.eye(3, dtype=complex)
    B[:, 1] = 1j * B[:, 0]
    ok, res = is_special_lagrangian_subspace(B)
    assert not ok and res["omega"] > 0.5
    with pytest.raises(ValueError):
        canonical_theta(B)
    with pytest.raises(ValueError):
        is_special_lagrangian_subspace(np.zeros((3, 3)))
    rng = np.random.default_rng(1)
    # a generic SU(3) image of R^3 is special Lagrangian but not H-equivalent to all W_theta
    ok, _ = is_special_lagrangian_subspace(random_su3(rng) @ np.eye(3))
    assert ok


def test_stabilizer_dimensions():
    assert stabilizer_algebra_dim(0.0) == 1
    assert stabilizer_algebra_dim(np.pi / 4) == 1
    for th in (0.1, 0.2, 0.6):
        assert stabilizer_algebra_dim(th) == 0
    _, gens = stabilizer_algebra(0.0)
    X = gens[0] / np.abs(gens[0]).max()
    assert np.allclose(np.abs(X), [[0, 0, 0], [0, 0, 1], [0, 1, 0]])
    _, gens = stabilizer_algebra(np.pi / 4)
    X = gens[0] / np.abs(gens[0]).max()
    assert np.allclose(np.abs(X), [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    assert np.allclose(X, -X.T)


def test_cr_criterion_only_at_zero():
    assert cr_criterion(w_theta(0.0))
    for th in (0.1, 0.3, 0.7):
        assert not cr_criterion(w_theta(th))
    with pytest.raises(ValueError):
        cr_criterion(w_theta(np.pi / 4))


def test_kernel_is_perpendicular_to_its_complex_rotation():
    for th in (0.0, 0.3, 0.7):
        assert jk_orthogonal_residual(w_theta(th)) < 1e-12


def test_u1_representative():
    rng = np.random.default_rng(2)
    for th in (0.1, 0.4, 1.2):
        phi = rng.uniform(-1, 1)
        V = np.diag([np.exp(-1j * phi), np.exp(1j * phi)]) @ v_theta(th)
        r = u1_representative(V)
        assert r["residual"] < 1e-10
        assert abs(r["theta"] - th) < 1e-8
