"""Affine chart on CP^3, the Sp(2) section and the nearly Kaehler forms.

Points of the chart are p = (Z1, Z2, Z3) standing for [1 : Z1 : Z2 : Z3].
Tangent vectors are complex 3-vectors in the same coordinates.  The unitary
coframe (omega1, omega2, omega3) is the pullback of the Maurer-Cartan form
along the section s; omega3 is the vertical (fibre) component and is
antilinear in the chart coordinates.
"""
from __future__ import annotations

import numpy as np

from .algebra import (SQRT2, QJ, QuatMat2, Quaternion, embed_c4, unpack_mc,
                      MCComponents)

CHART_EPS = 1e-8


def as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=complex).reshape(-1)
    if p.shape != (3,):
        raise ValueError(f"chart point must have 3 complex coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("chart point has non-finite coordinates")
    return p


def hom_to_chart(h) -> np.ndarray:
    """[Z0 : Z1 : Z2 : Z3] -> (Z1, Z2, Z3) / Z0; raises if Z0 is (nearly) zero."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.shape != (4,):
        raise ValueError("homogeneous point must have 4 coordinates")
    nrm = np.linalg.norm(h)
    if nrm == 0:
        raise ValueError("zero vector is not a point of CP^3")
    if abs(h[0]) < CHART_EPS * nrm:
        raise ValueError("point lies outside the chart Z0 != 0")
    return h[1:] / h[0]


def chart_to_hom(p) -> np.ndarray:
    p = as_point(p)
    return np.concatenate([[1.0 + 0j], p])


def quaternionic_j(h) -> np.ndarray:
    """Antiholomorphic involution induced by right multiplication with j."""
    h = np.asarray(h, dtype=complex)
    return np.array([-np.conj(h[1]), np.conj(h[0]), -np.conj(h[3]), np.conj(h[2])])


# Fixed Sp(2) elements used to move a point into the chart.
_MOVERS = [
    np.eye(4, dtype=complex),
    embed_c4([[0, 1], [-1, 0]]),
    embed_c4([[QJ, 0], [0, QJ]]),
    embed_c4([[QJ, 0], [0, QJ]]) @ embed_c4([[0, 1], [-1, 0]]),
]


def move_into_chart(h):
    """Return (g, p): g in Sp(2) (4x4) and the chart point of g.h, with |(g.h)_0| maximal."""
    h = np.asarray(h, dtype=complex)
    best = max(_MOVERS, key=lambda g: abs((g @ h)[0]))
    return best, hom_to_chart(best @ h)


# ---------------------------------------------------------------------------
# Section and coframe

def section_quat(p) -> QuatMat2:
    """Sp(2)-valued section over the chart, regular everywhere on it."""
    Z1, Z2, Z3 = as_point(p)
    h1 = Quaternion(1.0, Z1)
    h2 = Quaternion(Z2, Z3)
    nz = np.sqrt(h1.norm() ** 2 + h2.norm() ** 2)
    a = (1.0 + h2.norm() ** 2 / h1.norm() ** 2) ** -0.5
    top_right = -(h1.conj().inverse() * h2.conj()) * a
    return QuatMat2([[h1 * (1 / nz), top_right], [h2 * (1 / nz), Quaternion(a, 0)]])


def section_s(p) -> np.ndarray:
    """Complex 4x4 image of the section at p."""
    return embed_c4(section_quat(p))


def mc_pullback_fd(p, v, step: float = 1e-4) -> MCComponents:
    """Components of s^{-1} ds(v) by a 4th-order central difference."""
    p = as_point(p)
    v = np.asarray(v, dtype=complex)
    S = section_s(p)
    d = (-section_s(p + 2 * step * v) + 8 * section_s(p + step * v)
         - 8 * section_s(p - step * v) + section_s(p - 2 * step * v)) / (12 * step)
    return unpack_mc(S.conj().T @ d)


def coframe(p, v) -> np.ndarray:
    """(omega1, omega2, omega3)(v) at p; v may be a (3,) vector or (3, m) array."""
    Z1, Z2, Z3 = as_point(p)
    v = np.asarray(v, dtype=complex)
    v1, v2, v3 = v[0], v[1], v[2]
    n = 1 + abs(Z1) ** 2 + abs(Z2) ** 2 + abs(Z3) ** 2
    q2 = 1 + abs(Z1) ** 2
    f = SQRT2 / (n * np.sqrt(q2))
    o1 = f * ((np.conj(Z3) - np.conj(Z1) * Z2) * v1 + q2 * v2)
    o2 = f * ((-np.conj(Z2) - np.conj(Z1) * Z3) * v1 + q2 * v3)
    o3 = (np.conj(v1) - np.conj(Z3) * np.conj(v2) + np.conj(Z2) * np.conj(v3)) / n
    return np.array([o1, o2, o3])


def real_coframe_matrix(p) -> np.ndarray:
    """6x6 real matrix taking (Re v, Im v) to (Re omega, Im omega)."""
    cols = []
    for k in range(6):
        e = np.zeros(3, dtype=complex)
        e[k % 3] = 1.0 if k < 3 else 1j
        c = coframe(p, e)
        cols.append(np.concatenate([c.real, c.imag]))
    return np.array(cols).T


def vector_from_coframe(p, c) -> np.ndarray:
    """Tangent vector v with coframe(p, v) = c."""
    c = np.asarray(c, dtype=complex)
    x = np.linalg.solve(real_coframe_matrix(p), np.concatenate([c.real, c.imag]))
    return x[:3] + 1j * x[3:]


def almost_complex_j(p, v) -> np.ndarray:
    """Nearly Kaehler almost complex structure applied to v."""
    return vector_from_coframe(p, 1j * coframe(p, v))


# ---------------------------------------------------------------------------
# Forms

def _herm(p, X, Y):
    return np.sum(coframe(p, X) * np.conj(coframe(p, Y)), axis=0)


def metric_g(p, X, Y) -> float:
    return np.real(_herm(p, X, Y))


def nk_omega(p, X, Y) -> float:
    return -np.imag(_herm(p, X, Y))


def omega_vertical(p, X, Y) -> float:
    cx, cy = coframe(p, X), coframe(p, Y)
    return -np.imag(cx[2] * np.conj(cy[2]))


def omega_horizontal(p, X, Y) -> float:
    return nk_omega(p, X, Y) - omega_vertical(p, X, Y)


def nk_psi(p, X, Y, W) -> complex:
    """Complex volume form -i * det(omega(X), omega(Y), omega(W))."""
    M = np.array([coframe(p, X), coframe(p, Y), coframe(p, W)]).T
    return -1j * np.linalg.det(M)


def gram(p, vectors) -> np.ndarray:
    """Real Gram matrix g(v_a, v_b)."""
    C = np.array([coframe(p, v) for v in vectors])
    return np.real(C @ C.conj().T)
