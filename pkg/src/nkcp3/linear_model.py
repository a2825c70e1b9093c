"""Special Lagrangian 3-planes in C^3 under H = S(U(2) x U(1)).

A basis is a 3x3 complex matrix whose columns are the basis vectors.  The
linear forms are omega = (i/2) sum dz_k ^ dz_k-bar, psi = -i dz1 ^ dz2 ^ dz3
and omega_V = (i/2) dz3 ^ dz3-bar, matching the conventions of `chart`.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .algebra import SQRT2, expm, rank_tol

J_PRIME = np.diag([1j, 1j, -1j])


def t_theta(theta: float) -> np.ndarray:
    e = np.exp(1j * theta)
    em = np.exp(-1j * theta)
    return np.array([[1, 0, 0],
                     [0, -1j * em / SQRT2, e / SQRT2],
                     [0, -em / SQRT2, 1j * e / SQRT2]], dtype=complex)


def w_theta(theta: float) -> np.ndarray:
    """Basis of W_theta = T_theta(R^3)."""
    return t_theta(theta)


def lin_omega(X, Y) -> float:
    return float(-np.imag(np.sum(np.asarray(X) * np.conj(Y))))


def lin_omega_v(X, Y) -> float:
    return float(-np.imag(X[2] * np.conj(Y[2])))


def lin_psi(X, Y, W) -> complex:
    return complex(-1j * np.linalg.det(np.array([X, Y, W]).T))


def real_gram(B: np.ndarray) -> np.ndarray:
    B = np.asarray(B, dtype=complex)
    return np.real(B.conj().T @ B)


def orthonormalize(B: np.ndarray) -> np.ndarray:
    """Real-orthonormal basis (columns) of the real span of the columns of B."""
    B = np.asarray(B, dtype=complex)
    G = real_gram(B)
    w, V = np.linalg.eigh(G)
    if w.min() <= 1e-12 * max(w.max(), 1e-300):
        raise ValueError("degenerate basis: columns are not real-linearly independent")
    return B @ V @ np.diag(w ** -0.5) @ V.T


def is_special_lagrangian_subspace(B: np.ndarray, tol: float = 1e-10) -> tuple:
    """(flag, residuals): omega vanishes and |Im psi| equals the Gram volume."""
    B = np.asarray(B, dtype=complex)
    R = np.vstack([B.real, B.imag])
    if rank_tol(R, 1e-10) < 3:
        raise ValueError("degenerate basis: columns are not real-linearly independent")
    cols = [B[:, k] for k in range(3)]
    om = max(abs(lin_omega(cols[a], cols[b])) for a in range(3) for b in range(a + 1, 3))
    vol = np.sqrt(np.linalg.det(real_gram(B)))
    ps = lin_psi(*cols)
    scale = max(1.0, vol)
    res = {"omega": om, "volume": abs(abs(ps.imag) - vol), "re_psi": abs(ps.real)}
    return bool(om < tol * scale and res["volume"] < tol * scale), res


def vertical_matrix(onb: np.ndarray) -> np.ndarray:
    """2x3 real matrix of the b3-component on an orthonormal basis."""
    c3 = onb[2, :]
    return np.array([c3.real, c3.imag])


def theta_from_singular_values(sv) -> float:
    """Angle in [0, pi/4] from the vertical singular values of a special Lagrangian plane.

    For such planes s1^2 + s2^2 = 1 with cos 2theta = 2 s1 s2 and sin 2theta = s1^2 - s2^2.
    """
    s1 = float(sv[0])
    s2 = float(sv[1]) if len(sv) > 1 else 0.0
    return 0.5 * float(np.arctan2(s1 * s1 - s2 * s2, 2 * s1 * s2))


class CanonicalForm(NamedTuple):
    theta: float
    n_w: int
    half_abs_cos2theta: float  # |w1| |omega_V(w2, w3)| / |Im psi(w1, w2, w3)|


def kernel_split(B: np.ndarray, tol: float = 1e-9):
    """Orthonormal (K_W basis, K_W-perp basis) of the real span of B."""
    Q = orthonormalize(B)
    M = vertical_matrix(Q)
    _, sv, Vt = np.linalg.svd(M)
    rank = int(np.sum(sv > tol))
    K = Q @ Vt[rank:].T
    Kp = Q @ Vt[:rank].T
    return K, Kp, sv


def canonical_theta(B: np.ndarray, tol: float = 1e-9) -> CanonicalForm:
    ok, res = is_special_lagrangian_subspace(B, max(tol, 1e-10))
    if not ok:
        raise ValueError(f"basis does not span a special Lagrangian subspace: {res}")
    K, Kp, sv = kernel_split(B, tol)
    n_w = K.shape[1]
    if n_w >= 2:
        return CanonicalForm(float(np.pi / 4), 2, 0.0)
    theta = theta_from_singular_values(sv)
    w1, w2, w3 = K[:, 0], Kp[:, 0], Kp[:, 1]
    ratio = (np.linalg.norm(w1) * abs(lin_omega_v(w2, w3)) / abs(lin_psi(w1, w2, w3).imag))
    return CanonicalForm(theta, 1, float(ratio))


# ---------------------------------------------------------------------------
# Structure group H

def h_algebra_basis():
    """Real basis of s(u(2) + u(1)) as 3x3 complex matrices."""
    def blk(A2):
        X = np.zeros((3, 3), dtype=complex)
        X[:2, :2] = A2
        X[2, 2] = -np.trace(A2)
        return X
    return [blk(np.diag([1j, 0])), blk(np.diag([0, 1j])),
            blk(np.array([[0, -1], [1, 0]])), blk(np.array([[0, 1j], [1j, 0]]))]


def random_h(rng) -> np.ndarray:
    return expm(sum(a * X for a, X in zip(rng.normal(size=4) * 2, h_algebra_basis())))


def random_su3(rng) -> np.ndarray:
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    X = A - A.conj().T
    X -= np.trace(X) / 3 * np.eye(3)
    return expm(X)


def stabilizer_algebra(theta: float, tol: float = 1e-9):
    """Basis of {X in h : X W_theta in W_theta}, as elements of so(3) after T_theta conjugation.

    Returns (dimension, list of generators T^{-1} X T).
    """
    T = t_theta(theta)
    Ti = np.linalg.inv(T)
    basis = h_algebra_basis()
    conj = [Ti @ X @ T for X in basis]
    A = np.array([c.imag.reshape(-1) for c in conj]).T  # 9 x 4
    _, sv, Vt = np.linalg.svd(A)
    rank = int(np.sum(sv > tol * max(sv[0], 1e-300)))
    null = Vt[rank:]
    gens = [np.real(sum(v[k] * conj[k] for k in range(4))) for v in null]
    return len(gens), gens


def stabilizer_algebra_dim(theta: float, tol: float = 1e-9) -> int:
    return stabilizer_algebra(theta, tol)[0]


def cr_criterion(B: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether K_W-perp is invariant under J' = diag(i, i, -i)."""
    K, Kp, sv = kernel_split(B)
    if K.shape[1] >= 2:
        raise ValueError("criterion is undefined at theta = pi/4")
    img = J_PRIME @ Kp
    # J' Kp must lie in the real span of Kp
    R = np.vstack([Kp.real, Kp.imag])
    Y = np.vstack([img.real, img.imag])
    coef, *_ = np.linalg.lstsq(R, Y, rcond=None)
    return bool(np.abs(R @ coef - Y).max() < tol)


def jk_orthogonal_residual(B: np.ndarray) -> float:
    """max |<i K_W, W>| (real inner product) for the Lagrangian subspace spanned by B."""
    K, _, _ = kernel_split(B)
    Q = orthonormalize(B)
    return float(np.abs(np.real((1j * K).conj().T @ Q)).max()) if K.size else 0.0


# ---------------------------------------------------------------------------
# Planes in C^2 = span(b2, b3)

def v_theta(theta: float) -> np.ndarray:
    """2x2 basis (columns) of V_theta inside span(b2, b3)."""
    return t_theta(theta)[1:, 1:]


def _projector(V: np.ndarray) -> np.ndarray:
    R = np.vstack([V.real, V.imag])
    Q, _ = np.linalg.qr(R)
    return Q @ Q.T


def u1_representative(V: np.ndarray, starts: int = 8) -> dict:
    """Find phi, theta in [0, pi/2] with diag(e^{i phi}, e^{-i phi}) V = V_theta."""
    V = np.asarray(V, dtype=complex)

    def resid(x):
        phi, th = x
        D = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
        return (_projector(D @ V) - _projector(v_theta(th))).reshape(-1)

    best = None
    for k in range(starts):
        x0 = [np.pi * k / starts, np.pi / 2 * ((k * 0.37) % 1)]
        sol = least_squares(resid, x0, bounds=([-np.pi, 0.0], [np.pi, np.pi / 2]),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.abs(sol.fun).max())
        if best is None or r < best["residual"]:
            best = {"phi": float(sol.x[0]), "theta": float(sol.x[1]), "residual": r}
    return best
