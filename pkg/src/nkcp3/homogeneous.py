"""Geometry of three-dimensional group orbits: metric, Ricci, second fundamental form, cubic."""
from __future__ import annotations

import itertools
from typing import List

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation

from .algebra import rank_tol, structure_constants, sym3_eigenvalues
from .chart import as_point, coframe, nk_omega
from .symmetry import GeneratorSet, killing_derivative, killing_field


def _c2r(v):
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


def _r2c(x):
    return x[:3] + 1j * x[3:]


_BASIS6 = [_r2c(e) for e in np.eye(6)]


def _xis(gens) -> List[np.ndarray]:
    return list(gens.xis) if isinstance(gens, GeneratorSet) else list(gens)


def independent_generators(gens, p, tol: float = 1e-8) -> List[np.ndarray]:
    """Greedy maximal subset (in the given order) with independent Killing fields at p."""
    chosen, rows = [], []
    for x in _xis(gens):
        r = _c2r(killing_field(x, p))
        if rank_tol(np.array(rows + [r]), tol) > len(rows) and np.abs(r).max() > tol:
            chosen.append(x)
            rows.append(r)
    return chosen


def induced_metric(gens, p) -> np.ndarray:
    """Gram matrix g(K_i, K_j) at p; requires a three-dimensional orbit."""
    xis = _xis(gens)
    K = [killing_field(x, p) for x in xis]
    C = np.array([coframe(p, k) for k in K])
    G = np.real(C @ C.conj().T)
    if len(xis) != 3 or rank_tol(G, 1e-10) < 3:
        raise ValueError("induced metric needs three generators with independent Killing fields")
    return G


# ---------------------------------------------------------------------------
# Left-invariant Ricci curvature

def ricci_left_invariant(c: np.ndarray, G: np.ndarray):
    """Ricci tensor of the left-invariant metric G on a Lie algebra with constants c.

    c[i, j, k] are the coefficients of [e_i, e_j] on e_k.  Returns (Ric, eigenvalues):
    Ric is expressed in a G-orthonormal basis, so its eigenvalues are those of G^{-1} Ric.
    """
    G = np.asarray(G, dtype=float)
    w, V = np.linalg.eigh(0.5 * (G + G.T))
    if w.min() <= 0:
        raise ValueError("metric is not positive definite")
    n = c.shape[0]
    P = V @ np.diag(w ** -0.5)
    Pi = np.linalg.inv(P)
    cc = np.einsum("ai,bj,abk,lk->ijl", P, P, c, Pi)
    # Koszul: nabla_{f_i} f_j = sum_k Gam[i, j, k] f_k
    Gam = 0.5 * (cc - np.einsum("jki->ijk", cc) + np.einsum("kij->ijk", cc))
    Ric = np.zeros((n, n))
    eye = np.eye(n)
    for a in range(n):
        for b in range(n):
            s = 0.0
            for i in range(n):
                fb = eye[b]
                t = (fb @ Gam[a] @ Gam[i] - fb @ Gam[i] @ Gam[a]
                     - sum(cc[i, a, k] * (fb @ Gam[k]) for k in range(n)))
                s += t[i]
            Ric[a, b] = s
    Ric = 0.5 * (Ric + Ric.T)
    return Ric, sym3_eigenvalues(Ric) if n == 3 else np.linalg.eigvalsh(Ric)


def orbit_ricci(gens, p):
    """Ricci eigenvalues of a simply transitive orbit from the generators' algebra."""
    xis = _xis(gens)[-3:]
    c, res = structure_constants(xis)
    G = induced_metric(xis, p)
    Ric, ev = ricci_left_invariant(c, G)
    return {"ricci": Ric, "eigenvalues": ev, "closure_residual": res}


# ---------------------------------------------------------------------------
# Ambient Levi-Civita connection and second fundamental form

def chart_metric(p) -> np.ndarray:
    """6x6 real metric matrix in the real chart coordinates (Re Z, Im Z)."""
    F = np.array([coframe(p, b) for b in _BASIS6])
    return np.real(F @ F.conj().T)


def christoffels_fd(p, step: float = 1e-3, metric=chart_metric) -> np.ndarray:
    """Gamma[k, i, j] from central differences of the metric in real coordinates."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = _c2r(as_point(p)) if np.size(p) == 3 else np.asarray(p, dtype=float)
    to_pt = (lambda y: _r2c(y)) if np.size(p) == 3 else (lambda y: y)
    dim = x.size
    dg = np.zeros((dim, dim, dim))
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = step
        dg[a] = (metric(to_pt(x + e)) - metric(to_pt(x - e))) / (2 * step)
    gi = np.linalg.inv(metric(to_pt(x)))
    # T[l, i, j] = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    T = 0.5 * (np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg)
    return np.einsum("kl,lij->kij", gi, T)


def mgs_coefficients(G: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Columns = coefficients of a G-orthonormal basis built by modified Gram-Schmidt."""
    n = G.shape[0]
    cols = []
    scale = np.sqrt(max(np.diag(G).max(), 1e-300))
    for i in range(n):
        v = np.eye(n)[i]
        for b in cols:
            v = v - (v @ G @ b) * b
        nrm = np.sqrt(max(v @ G @ v, 0.0))
        if nrm > tol * scale:
            cols.append(v / nrm)
    return np.array(cols).T


def second_fundamental_form(gens, p, step: float = 1e-3, richardson: bool = True) -> dict:
    """II and the cubic C(X, Y, Z) = omega(II(X, Y), Z) on an orthonormal tangent basis.

    Killing fields serve as extensions of tangent vectors; with Richardson
    extrapolation over (step, step/2) the finite-difference error is O(step^4).
    """
    p = as_point(p)
    xis = independent_generators(gens, p)
    if len(xis) != 3:
        raise ValueError(f"orbit dimension {len(xis)} != 3")
    K = [killing_field(x, p) for x in xis]
    Kr = np.array([_c2r(k) for k in K]).T  # 6 x 3
    gm = chart_metric(p)

    def nabla(h):
        Gam = christoffels_fd(p, h)
        out = np.zeros((3, 3, 6))
        for i in range(3):
            for j in range(3):
                d = _c2r(killing_derivative(xis[j], p, K[i]))
                out[i, j] = d + np.einsum("kij,i,j->k", Gam, Kr[:, i], Kr[:, j])
        return out

    N = nabla(step)
    if richardson:
        N = (4 * nabla(step / 2) - N) / 3
    Gt = Kr.T @ gm @ Kr
    Pt = Kr @ np.linalg.inv(Gt) @ Kr.T @ gm  # g-orthogonal projector onto the tangent space
    B = mgs_coefficients(Gt)
    E = [_r2c(Kr @ B[:, a]) for a in range(3)]
    II = np.zeros((3, 3, 6))
    C = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            v = np.einsum("i,j,ijk->k", B[:, a], B[:, b], N)
            nv = v - Pt @ v
            II[a, b] = nv
            for c in range(3):
                C[a, b, c] = nk_omega(p, _r2c(nv), E[c])
    ii_norm = float(np.sqrt(sum(II[a, b] @ gm @ II[a, b] for a in range(3) for b in range(3))))
    H = sum(II[a, a] for a in range(3))
    sym = max(float(np.abs(C - np.transpose(C, perm)).max())
              for perm in itertools.permutations(range(3)))
    return {"II": II, "cubic": C, "ii_norm": ii_norm,
            "mean_curvature": float(np.sqrt(H @ gm @ H)),
            "symmetry_residual": sym, "basis": E, "gram": Gt}


# ---------------------------------------------------------------------------
# Cubic forms

def symmetrize(C: np.ndarray) -> np.ndarray:
    return sum(np.transpose(C, p) for p in itertools.permutations(range(3))) / 6.0


def rotate_cubic(C: np.ndarray, R: np.ndarray) -> np.ndarray:
    return np.einsum("ia,jb,kc,abc->ijk", R, R, R, C)


def cubic_from_monomials(coeffs: dict) -> np.ndarray:
    """Symmetric tensor of sum coeff * x_i x_j x_k, keys are index triples (0-based)."""
    C = np.zeros((3, 3, 3))
    for key, val in coeffs.items():
        perms = set(itertools.permutations(key))
        for q in perms:
            C[q] += val / len(perms)
    return C


def monomial_norm2(C: np.ndarray) -> float:
    """Sum of squared monomial coefficients of the cubic polynomial C(x, x, x)."""
    total = 0.0
    for key in itertools.combinations_with_replacement(range(3), 3):
        total += (len(set(itertools.permutations(key))) * C[key]) ** 2
    return float(total)


def infinitesimal_stabilizer_dim(C: np.ndarray, tol: float = 1e-6) -> int:
    """Dimension of the so(3) stabiliser of C; a cubic below tol counts as zero."""
    if np.abs(C).max() < tol:
        return 3
    gens = [np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
            np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]]),
            np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]])]
    rows = []
    for X in gens:
        d = (np.einsum("ia,abc->ibc", X, C) + np.einsum("jb,abc->ajc", X, C)
             + np.einsum("kc,abc->abk", X, C))
        rows.append(d.reshape(-1))
    A = np.array(rows).T
    sv = np.linalg.svd(A, compute_uv=False)
    scale = max(np.abs(C).max(), 1e-300)
    return int(np.sum(sv < tol * scale))


def symmetry_order(C: np.ndarray, tol: float = 1e-6, starts: int = 400, seed: int = 0):
    """Number of rotations R in SO(3) with R.C = C; None when the stabiliser is infinite."""
    C = np.asarray(C, dtype=float)
    scale = np.sqrt(np.sum(C * C))
    if scale < tol or infinitesimal_stabilizer_dim(C, tol) > 0:
        return None
    rng = np.random.default_rng(seed)
    starts_rv = [np.zeros(3)] + list(Rotation.random(starts, random_state=rng).as_rotvec())

    def resid(rv):
        return (rotate_cubic(C, Rotation.from_rotvec(rv).as_matrix()) - C).reshape(-1) / scale

    found: List[np.ndarray] = []
    for rv in starts_rv:
        sol = least_squares(resid, rv, xtol=1e-14, ftol=1e-14, gtol=1e-14)
        if np.abs(sol.fun).max() < tol:
            R = Rotation.from_rotvec(sol.x).as_matrix()
            if all(np.abs(R - F).max() > 1e-4 for F in found):
                found.append(R)
    return len(found)


def s3_normal_form(a: float, b: float) -> np.ndarray:
    """Cubic a(x1^3 - 3 x1 x2^2) + b(x2^3 - 3 x2 x1^2)."""
    return cubic_from_monomials({(0, 0, 0): a, (0, 1, 1): -3 * a,
                                 (1, 1, 1): b, (0, 0, 1): -3 * b})


def fit_s3_normal_form(C: np.ndarray, starts: int = 50, seed: int = 0) -> dict:
    """Best rotation R and (a, b) with R.C close to the S3 normal form."""
    rng = np.random.default_rng(seed)
    scale = max(np.sqrt(np.sum(C * C)), 1e-300)
    best = None
    for rv in Rotation.random(starts, random_state=rng).as_rotvec():
        def resid(x):
            R = Rotation.from_rotvec(x[:3]).as_matrix()
            return (rotate_cubic(C, R) - s3_normal_form(x[3], x[4])).reshape(-1) / scale
        sol = least_squares(resid, np.concatenate([rv, [0.1, 0.1]]), xtol=1e-14, ftol=1e-14)
        r = float(np.abs(sol.fun).max())
        if best is None or r < best["residual"]:
            best = {"residual": r, "a": float(sol.x[3]), "b": float(sol.x[4]),
                    "rotation": Rotation.from_rotvec(sol.x[:3]).as_matrix()}
    return best


def cubic_invariants(C: np.ndarray, tol: float = 1e-6) -> dict:
    C = np.asarray(C, dtype=float)
    trace = max(float(np.abs(np.einsum("iik->k", C)).max()),
                float(np.abs(np.einsum("iki->k", C)).max()),
                float(np.abs(np.einsum("kii->k", C)).max()))
    order = symmetry_order(C, tol)
    return {"norm2": float(np.sum(C * C)), "monomial_norm2": monomial_norm2(C),
            "trace_residual": trace,
            "symmetry_order": "infinite" if order is None else order}
