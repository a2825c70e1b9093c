"""Quaternions, 2x2 quaternionic matrices and small complex matrix helpers.

A quaternion is stored as q = z + j*w with z, w complex.  The complex 2x2
image of q is [[z, -conj(w)], [w, conj(z)]], and a 2x2 quaternionic matrix
becomes a 4x4 complex matrix acting on (Z0, Z1, Z2, Z3) with
q1 = Z0 + j Z1, q2 = Z2 + j Z3.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

SQRT2 = np.sqrt(2.0)

DEFAULT_TOL = 1e-12

# Quaternionic structure on C^4: left quaternionic matrices commute with
# Z -> JQ @ conj(Z).
JQ = np.array([[0, -1, 0, 0],
               [1, 0, 0, 0],
               [0, 0, 0, -1],
               [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class Quaternion:
    """q = z + j*w."""
    z: complex = 0j
    w: complex = 0j

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.z + other.z, self.w + other.w)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.z - other.z, self.w - other.w)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.z, -self.w)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            # (z1 + j w1)(z2 + j w2) using w j = j conj(w) and j^2 = -1
            z = self.z * other.z - np.conj(self.w) * other.w
            w = self.w * other.z + np.conj(self.z) * other.w
            return Quaternion(z, w)
        # real scalar
        return Quaternion(self.z * other, self.w * other)

    __rmul__ = __mul__

    def conj(self) -> "Quaternion":
        return Quaternion(np.conj(self.z), -self.w)

    def norm(self) -> float:
        return float(np.sqrt(abs(self.z) ** 2 + abs(self.w) ** 2))

    def inverse(self) -> "Quaternion":
        n2 = abs(self.z) ** 2 + abs(self.w) ** 2
        if n2 == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conj()
        return Quaternion(c.z / n2, c.w / n2)

    def matrix(self) -> np.ndarray:
        return np.array([[self.z, -np.conj(self.w)],
                         [self.w, np.conj(self.z)]], dtype=complex)

    def to_json(self) -> dict:
        return {"z": complex_to_json(self.z), "w": complex_to_json(self.w)}

    @staticmethod
    def from_json(d: dict) -> "Quaternion":
        return Quaternion(complex_from_json(d["z"]), complex_from_json(d["w"]))


QONE = Quaternion(1, 0)
QI = Quaternion(1j, 0)
QJ = Quaternion(0, 1)
QK = QI * QJ  # = Quaternion(0, -1j)


def as_quaternion(x) -> Quaternion:
    """Accept a Quaternion, a (z, w) pair or a complex number."""
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return Quaternion(complex(x[0]), complex(x[1]))
    return Quaternion(complex(x), 0j)


class QuatMat2:
    """2x2 matrix with quaternion entries."""

    def __init__(self, entries):
        self.entries = [[as_quaternion(entries[r][c]) for c in range(2)] for r in range(2)]

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def __matmul__(self, other: "QuatMat2") -> "QuatMat2":
        e, f = self.entries, other.entries
        out = [[e[r][0] * f[0][c] + e[r][1] * f[1][c] for c in range(2)] for r in range(2)]
        return QuatMat2(out)

    def conj_transpose(self) -> "QuatMat2":
        e = self.entries
        return QuatMat2([[e[c][r].conj() for c in range(2)] for r in range(2)])

    def to_c4(self) -> np.ndarray:
        return embed_c4(self)

    def to_json(self) -> list:
        return [[q.to_json() for q in row] for row in self.entries]

    @staticmethod
    def from_c4(M: np.ndarray) -> "QuatMat2":
        M = np.asarray(M)
        return QuatMat2([[Quaternion(M[2 * r, 2 * c], M[2 * r + 1, 2 * c]) for c in range(2)]
                         for r in range(2)])

    @staticmethod
    def identity() -> "QuatMat2":
        return QuatMat2([[QONE, Quaternion()], [Quaternion(), QONE]])


def embed_c4(A) -> np.ndarray:
    """Complex 4x4 image of a 2x2 quaternionic matrix."""
    if not isinstance(A, QuatMat2):
        A = QuatMat2(A)
    M = np.zeros((4, 4), dtype=complex)
    for r in range(2):
        for c in range(2):
            M[2 * r:2 * r + 2, 2 * c:2 * c + 2] = A[r, c].matrix()
    return M


def diag_h(a, b) -> np.ndarray:
    """embed_c4 of diag(a, b)."""
    return embed_c4([[a, 0], [0, b]])


def complex_entries(M2) -> np.ndarray:
    """embed_c4 of a 2x2 matrix with complex entries (the inclusion C^2 in H^2)."""
    M2 = np.asarray(M2, dtype=complex)
    return embed_c4([[(M2[0, 0], 0), (M2[0, 1], 0)], [(M2[1, 0], 0), (M2[1, 1], 0)]])


def sp2_residual(X: np.ndarray) -> float:
    """Distance of a complex 4x4 matrix from the embedded sp(2)."""
    X = np.asarray(X)
    return float(max(np.abs(X + X.conj().T).max(), np.abs(X @ JQ - JQ @ X.conj()).max()))


def is_sp2(X: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return sp2_residual(X) < tol


def bracket(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"bracket needs equal square shapes, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def expm(A: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(A))


def sym3_eigenvalues(S: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric 3x3 matrix."""
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    if np.abs(S - S.T).max() >= tol:
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(0.5 * (S + S.T))


def rank_tol(M: np.ndarray, tol: float = 1e-8) -> int:
    """Numerical rank: singular values below tol * largest count as zero."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    sv = np.linalg.svd(np.atleast_2d(np.asarray(M)), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


# ---------------------------------------------------------------------------
# Maurer-Cartan slot layout of sp(2)

class MCComponents(NamedTuple):
    rho1: float
    rho2: float
    tau: complex
    omega: np.ndarray  # (omega1, omega2, omega3)


def pack_mc(rho1: float, rho2: float, tau: complex, omega: Sequence[complex]) -> np.ndarray:
    """sp(2) element with the given Maurer-Cartan components."""
    o1, o2, o3 = (complex(x) for x in omega)
    Q = [[(1j * rho1, np.conj(o3)), (-np.conj(o1) / SQRT2, o2 / SQRT2)],
         [(o1 / SQRT2, o2 / SQRT2), (1j * rho2, tau)]]
    return embed_c4(Q)


def unpack_mc(X: np.ndarray) -> MCComponents:
    """Inverse of pack_mc (the real part of the (1,1) entry is ignored)."""
    X = np.asarray(X)
    z11, w11 = X[0, 0], X[1, 0]
    z21, w21 = X[2, 0], X[3, 0]
    z22, w22 = X[2, 2], X[3, 2]
    om = np.array([SQRT2 * z21, SQRT2 * w21, np.conj(w11)])
    return MCComponents(float(z11.imag), float(z22.imag), complex(w22), om)


def connection_a(rho1: float, rho2: float, tau: complex) -> np.ndarray:
    """The u(2)-valued connection matrix acting on (omega1, omega2, omega3)."""
    return np.array([[1j * (rho2 - rho1), -np.conj(tau), 0],
                     [tau, -1j * (rho1 + rho2), 0],
                     [0, 0, 2j * rho1]], dtype=complex)


def flatten_sp2(X: np.ndarray) -> np.ndarray:
    """Ten real coordinates (rho1, rho2, Re tau, Im tau, Re omega, Im omega)."""
    c = unpack_mc(X)
    return np.concatenate([[c.rho1, c.rho2, c.tau.real, c.tau.imag], c.omega.real, c.omega.imag])


def span_projection(basis: Sequence[np.ndarray], X: np.ndarray):
    """Least-squares coefficients of X in span(basis) and the distance from the span."""
    F = np.array([flatten_sp2(e) for e in basis]).T
    v = flatten_sp2(X)
    coef, *_ = np.linalg.lstsq(F, v, rcond=None)
    return coef, float(np.linalg.norm(F @ coef - v))


def structure_constants(basis: Sequence[np.ndarray]):
    """c[i, j, k] with [e_i, e_j] ~ sum_k c[i, j, k] e_k, plus worst projection residual."""
    n = len(basis)
    c = np.zeros((n, n, n))
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            coef, res = span_projection(basis, bracket(basis[i], basis[j]))
            c[i, j] = coef
            c[j, i] = -coef
            worst = max(worst, res)
    return c, worst


def closure_residual(basis: Sequence[np.ndarray]) -> float:
    """Largest distance of a pairwise bracket from the span of the basis."""
    return structure_constants(basis)[1]


def jacobi_residual(c: np.ndarray) -> float:
    n = c.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                # [[e_i,e_j],e_k] + cyclic
                t = (np.einsum("m,ml->l", c[i, j], c[:, k])
                     + np.einsum("m,ml->l", c[j, k], c[:, i])
                     + np.einsum("m,ml->l", c[k, i], c[:, j]))
                worst = max(worst, float(np.abs(t).max()))
    return worst


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    return eps


# ---------------------------------------------------------------------------
# JSON helpers

def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def matrix_to_json(M: np.ndarray) -> list:
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return [[complex_to_json(x) for x in row] for row in M]
    return M.tolist()


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex_from_json(x) for x in row] for row in rows], dtype=complex)
