"""Adjoint orbits of su(3): invariants, the canonical slice and stabilisers."""
from __future__ import annotations

from typing import List, NamedTuple

import numpy as np

from .algebra import rank_tol

SU3_TOL = 1e-12
DEGENERACY_TOL = 1e-10
# det d(rho1, Tr A^3)/d(lam, mu) = CONVERSION * det d(rho1, rho2_im)/d(lam, mu)
CONVERSION = 1j


class SlicePoint(NamedTuple):
    lam: float
    mu_s: float


def check_su3(A, tol: float = SU3_TOL) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (3, 3):
        raise ValueError("su(3) element must be a 3x3 matrix")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A + A.conj().T).max() > tol * scale or abs(np.trace(A)) > tol * scale:
        raise ValueError("matrix is not skew-Hermitian and trace-free")
    return A


def rho_invariants(A) -> tuple:
    """(Tr A^2, Im Tr A^3); the real part of Tr A^3 is checked to vanish."""
    A = check_su3(A)
    A2 = A @ A
    t2 = np.trace(A2)
    t3 = np.trace(A2 @ A)
    scale = max(1.0, float(np.abs(A).max()) ** 3)
    if abs(t3.real) > 1e-12 * scale or abs(t2.imag) > 1e-12 * scale:
        raise ValueError("trace invariants are not of the expected type")
    return float(t2.real), float(t3.imag)


def slice_element(sp) -> np.ndarray:
    lam, mu = sp
    return np.array([[1j * mu, -lam, 0], [lam, 1j * mu, 0], [0, 0, -2j * mu]], dtype=complex)


def slice_eigenvalues(sp) -> np.ndarray:
    lam, mu = sp
    return 1j * np.array([mu + lam, mu - lam, -2 * mu])


def rho_slice(sp) -> tuple:
    """Closed forms of (rho1, rho2_im) on the slice."""
    lam, mu = sp
    return -2 * lam ** 2 - 6 * mu ** 2, 6 * mu ** 3 - 6 * mu * lam ** 2


def jacobian_det_slice(sp) -> float:
    """det d(rho1, rho2_im)/d(lam, mu) = 24 lam^3 - 216 lam mu^2."""
    lam, mu = sp
    return float(24 * lam ** 3 - 216 * lam * mu ** 2)


def jacobian_det_fd(sp, step: float = 1e-5) -> float:
    lam, mu = sp

    def rho(l, m):
        return np.array(rho_invariants(slice_element((l, m))))
    J = np.column_stack([(rho(lam + step, mu) - rho(lam - step, mu)) / (2 * step),
                         (rho(lam, mu + step) - rho(lam, mu - step)) / (2 * step)])
    return float(np.linalg.det(J))


def complex_jacobian_det(sp) -> complex:
    """Determinant with respect to the complex-valued Tr A^3."""
    lam, mu = sp
    return complex(24j * lam ** 3 - 216j * lam * mu ** 2)


def conversion_constant(samples: int = 100, seed: int = 0) -> dict:
    """Ratio complex/real Jacobian over random slice points; constant iff spread is ~0."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        sp = rng.uniform(-3, 3, size=2)
        d = jacobian_det_slice(sp)
        if abs(d) > 1e-6:
            ratios.append(complex_jacobian_det(sp) / d)
    ratios = np.array(ratios)
    return {"constant": complex(ratios.mean()), "spread": float(np.abs(ratios - ratios.mean()).max())}


def degenerate_eigenvalues(sp, tol: float = DEGENERACY_TOL) -> bool:
    ev = slice_eigenvalues(sp)
    gaps = [abs(ev[a] - ev[b]) for a in range(3) for b in range(a + 1, 3)]
    return bool(min(gaps) < tol)


def on_zero_lines(sp, tol: float = 1e-10) -> bool:
    lam, mu = sp
    return bool(min(abs(lam), abs(lam - 3 * mu), abs(lam + 3 * mu)) < tol)


def so3_basis() -> List[np.ndarray]:
    out = []
    for a, b in ((1, 2), (2, 0), (0, 1)):
        X = np.zeros((3, 3), dtype=complex)
        X[a, b], X[b, a] = -1, 1
        out.append(X)
    return out


def su2_basis() -> List[np.ndarray]:
    """su(2) in the upper-left block."""
    sig = [np.array([[1j, 0], [0, -1j]]), np.array([[0, 1], [-1, 0]]), np.array([[0, 1j], [1j, 0]])]
    out = []
    for s in sig:
        X = np.zeros((3, 3), dtype=complex)
        X[:2, :2] = s
        out.append(X)
    return out


def stabilizer_dimension(subalg, A, tol: float = 1e-8) -> int:
    """dim {xi in span(subalg): [xi, A] = 0}."""
    A = np.asarray(A, dtype=complex)
    cols = []
    for X in subalg:
        C = X @ A - A @ X
        cols.append(np.concatenate([C.real.ravel(), C.imag.ravel()]))
    M = np.array(cols).T
    scale = max(1.0, float(np.abs(A).max()))
    return len(subalg) - rank_tol(M / scale, tol)


def random_su3_element(rng) -> np.ndarray:
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    X = X - X.conj().T
    return X - np.trace(X) / 3 * np.eye(3)


def zero_locus_grid(n: int = 200, lo: float = -3.0, hi: float = 3.0) -> dict:
    """Grid scan of the Jacobian; compares its zero set and degeneracy with the three lines.

    Grid points are classified exactly: the determinant is evaluated by the closed form,
    which vanishes to rounding on the lines, so the relative threshold is 1e-12.
    """
    g = np.linspace(lo, hi, n)
    rows, mismatch_det, mismatch_deg = [], 0, 0
    for lam in g:
        for mu in g:
            d = jacobian_det_slice((lam, mu))
            scale = max(1.0, abs(lam) ** 3 + abs(lam) * mu * mu)
            zero = abs(d) < 1e-12 * 216 * scale
            line = on_zero_lines((lam, mu), 1e-12 * max(1.0, abs(mu)))
            deg = degenerate_eigenvalues((lam, mu), 1e-10)
            mismatch_det += zero != line
            mismatch_deg += deg != line
            rows.append((float(lam), float(mu), d, bool(zero)))
    # sign changes between neighbours must sit within one cell of a line, and all
    # three lines must be crossed
    D = np.array([[jacobian_det_slice((l, m)) for m in g] for l in g])
    h = g[1] - g[0]
    L, Mu = np.meshgrid(g, g, indexing="ij")
    far, hit = 0, set()
    for sl_a, sl_b in (((slice(None, -1), slice(None)), (slice(1, None), slice(None))),
                       ((slice(None), slice(None, -1)), (slice(None), slice(1, None)))):
        change = np.sign(D[sl_a]) != np.sign(D[sl_b])
        lm = 0.5 * (L[sl_a] + L[sl_b])[change]
        mm = 0.5 * (Mu[sl_a] + Mu[sl_b])[change]
        dist = np.array([np.abs(lm), np.abs(lm - 3 * mm) / np.sqrt(10), np.abs(lm + 3 * mm) / np.sqrt(10)])
        far += int(np.sum(dist.min(axis=0) > h))
        hit.update(int(k) for k in np.unique(dist.argmin(axis=0)))
    return {"rows": rows, "zeros": sum(r[3] for r in rows),
            "mismatch_det": int(mismatch_det), "mismatch_degenerate": int(mismatch_deg),
            "sign_changes_off_lines": far, "lines_crossed": len(hit)}


def stabilizer_survey(samples: int = 10000, seed: int = 0) -> dict:
    """so(3) and su(2) stabiliser dimensions on random nondegenerate slice points and on
    random lines A0 + t A1 in su(3) (the latter measuring how rare dimension 1 is)."""
    rng = np.random.default_rng(seed)
    so3, su2 = so3_basis(), su2_basis()
    dims_so3, dims_su2 = {}, {}
    for _ in range(samples):
        sp = rng.uniform(-3, 3, size=2)
        if degenerate_eigenvalues(sp, 1e-6):
            continue
        A = slice_element(sp)
        d1, d2 = stabilizer_dimension(so3, A), stabilizer_dimension(su2, A)
        dims_so3[d1] = dims_so3.get(d1, 0) + 1
        dims_su2[d2] = dims_su2.get(d2, 0) + 1
    line_hits, line_total = 0, 0
    for _ in range(50):
        A0, A1 = random_su3_element(rng), random_su3_element(rng)
        for t in np.linspace(-1, 1, 41):
            line_total += 1
            line_hits += stabilizer_dimension(so3, A0 + t * A1) > 0
    return {"so3": dict(sorted(dims_so3.items())), "su2": dict(sorted(dims_su2.items())),
            "line_fraction_positive": line_hits / line_total}
