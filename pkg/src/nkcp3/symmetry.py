"""Killing fields of SU(2) subgroups of Sp(2), moment-type maps and slice scans."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .algebra import (QI, QJ, QK, Quaternion, bracket, complex_entries, diag_h,
                      levi_civita, rank_tol, sp2_residual)
from .chart import (as_point, chart_to_hom, coframe, metric_g,
                    move_into_chart, nk_omega, nk_psi, omega_vertical, quaternionic_j)
from .linear_model import theta_from_singular_values

SQRT3 = np.sqrt(3.0)


@dataclass
class GeneratorSet:
    """Named list of sp(2) generators; the last three form the su(2) triple."""
    id: str
    xis: List[np.ndarray]

    @property
    def triple(self) -> List[np.ndarray]:
        return self.xis[-3:]


# ---------------------------------------------------------------------------
# Generators

def k1_generators() -> GeneratorSet:
    """{1} x Sp(1): left multiplication on the second quaternionic coordinate."""
    xis = [diag_h(0, Quaternion(-0.5 * e.z, -0.5 * e.w)) for e in (QI, QJ, QK)]
    return GeneratorSet("K1", xis)


_PAULI = [np.array([[1, 0], [0, -1]], dtype=complex),
          np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]], dtype=complex)]


def k2_generators() -> GeneratorSet:
    """SU(2) inside U(2) in Sp(2), ordered (sigma3, sigma1, sigma2)."""
    return GeneratorSet("K2", [complex_entries(0.5j * s) for s in _PAULI])


def xi0() -> np.ndarray:
    """Centre of u(2): diag(i, i) with complex entries."""
    return complex_entries(np.diag([1j, 1j]))


def k2_extended_generators() -> GeneratorSet:
    return GeneratorSet("K2_extended", [xi0()] + k2_generators().xis)


def k3_matrix(a: complex, b: complex) -> np.ndarray:
    """Irreducible 4-dimensional SU(2) representation matrix, (a, b) in S^3."""
    ab, bb = np.conj(a), np.conj(b)
    A2, B2 = abs(a) ** 2, abs(b) ** 2
    r3 = SQRT3
    return np.array([
        [a ** 3, -r3 * a ** 2 * bb, r3 * a * bb ** 2, -bb ** 3],
        [r3 * a ** 2 * b, a * (A2 - 2 * B2), -bb * (2 * A2 - B2), r3 * ab * bb ** 2],
        [r3 * a * b ** 2, b * (2 * A2 - B2), ab * (A2 - 2 * B2), -r3 * ab ** 2 * bb],
        [b ** 3, r3 * ab * b ** 2, r3 * ab ** 2 * b, ab ** 3]], dtype=complex)


def k3_derivatives() -> List[np.ndarray]:
    """Derivatives of k3_matrix at (1, 0) in the directions (i a, b, i b)."""
    r3 = SQRT3
    D1 = np.diag([3j, 1j, -1j, -3j])
    D2 = np.zeros((4, 4), dtype=complex)
    D3 = np.zeros((4, 4), dtype=complex)
    for (r, c), v in {(0, 1): -r3, (1, 0): r3, (1, 2): -2, (2, 1): 2,
                      (2, 3): -r3, (3, 2): r3}.items():
        D2[r, c] = v
    for (r, c), v in {(0, 1): r3, (1, 0): r3, (1, 2): 2, (2, 1): 2,
                      (2, 3): r3, (3, 2): r3}.items():
        D3[r, c] = 1j * v
    return [D1, D2, D3]


# Representation coordinates -> chart coordinates: chart[r] = rep[K3_PERM[r]].
K3_PERM = (0, 3, 2, 1)


def k3_change_of_basis() -> np.ndarray:
    P = np.zeros((4, 4))
    for r, c in enumerate(K3_PERM):
        P[r, c] = 1.0
    return P


def k3_rep_to_chart(v) -> np.ndarray:
    """Homogeneous point in representation coordinates -> homogeneous chart coordinates."""
    return k3_change_of_basis() @ np.asarray(v, dtype=complex)


def k3_generators() -> GeneratorSet:
    P = k3_change_of_basis()
    D1, D2, D3 = k3_derivatives()
    xis = [P @ D1 @ P.T / 2, -P @ D2 @ P.T / 2, -P @ D3 @ P.T / 2]
    return GeneratorSet("K3", xis)


def generator_set(gen_id: str) -> GeneratorSet:
    table = {"K1": k1_generators, "K2": k2_generators,
             "K2_extended": k2_extended_generators, "K3": k3_generators}
    key = gen_id.upper().replace("K2_EXTENDED", "K2_extended")
    if key not in table:
        raise ValueError(f"unknown generator set {gen_id!r}")
    return table[key]()


def generator_invariants(gen: GeneratorSet) -> dict:
    """Residuals of the defining properties of a generator set."""
    eps = levi_civita()
    t = gen.triple
    br = 0.0
    for i in range(3):
        for j in range(3):
            target = -sum(eps[i, j, k] * t[k] for k in range(3))
            br = max(br, float(np.abs(bracket(t[i], t[j]) - target).max()))
    out = {"skew_hermitian": max(float(np.abs(x + x.conj().T).max()) for x in gen.xis),
           "sp2": max(sp2_residual(x) for x in gen.xis),
           "bracket": br}
    if len(gen.xis) == 4:
        out["centre"] = max(float(np.abs(bracket(gen.xis[0], x)).max()) for x in t)
    return out


# ---------------------------------------------------------------------------
# Killing fields and moment maps

def killing_field(xi: np.ndarray, p) -> np.ndarray:
    """Chart components of the fundamental vector field of xi at p."""
    p = as_point(p)
    W = np.asarray(xi) @ chart_to_hom(p)
    return W[1:] - p * W[0]


def killing_derivative(xi: np.ndarray, p, v) -> np.ndarray:
    """Directional derivative of killing_field(xi, .) at p along v."""
    p = as_point(p)
    v = np.asarray(v, dtype=complex)
    xi = np.asarray(xi)
    W = xi @ chart_to_hom(p)
    dW = xi @ np.concatenate([[0j], v])
    return dW[1:] - v * W[0] - p * dW[0]


class MomentValue(NamedTuple):
    mu: np.ndarray
    nu: float
    mu_v: np.ndarray
    re_psi: float


def _moment_from_fields(p, K) -> MomentValue:
    K1, K2, K3 = K
    mu = np.array([nk_omega(p, K2, K3), nk_omega(p, K3, K1), nk_omega(p, K1, K2)])
    muv = np.array([omega_vertical(p, K2, K3), omega_vertical(p, K3, K1),
                    omega_vertical(p, K1, K2)])
    ps = nk_psi(p, K1, K2, K3)
    return MomentValue(mu, float(ps.imag), muv, float(ps.real))


def moment(gen, p) -> MomentValue:
    """mu, nu, mu_V at a chart point for the su(2) triple of gen."""
    xis = gen.triple if isinstance(gen, GeneratorSet) else list(gen)[-3:]
    return _moment_from_fields(p, [killing_field(x, p) for x in xis])


def moment_hom(gen, h) -> MomentValue:
    """moment at a homogeneous point, moving it into the chart by a fixed Sp(2) element."""
    xis = gen.triple if isinstance(gen, GeneratorSet) else list(gen)[-3:]
    g, p = move_into_chart(h)
    gi = g.conj().T
    return moment([g @ x @ gi for x in xis], p)


def reps_vanishing_check(gen, p) -> float:
    return abs(moment(gen, p).re_psi)


def _real_directions():
    out = []
    for k in range(6):
        e = np.zeros(3, dtype=complex)
        e[k % 3] = 1.0 if k < 3 else 1j
        out.append(e)
    return out


DNU_FACTOR = 4.0


def dnu_identity_residual(gen, p, step: float = 1e-4, factor: float = DNU_FACTOR) -> dict:
    """Finite-difference check of the differential identities for nu and mu.

    Returns residuals of
      d nu = factor * sum_l mu_l omega(K_l, .)
      d mu_k = -omega(K_k, .) + 3 Re psi(K_i, K_j, .)
    and the least-squares factor best fitting the nu identity.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    p = as_point(p)
    xis = gen.triple if isinstance(gen, GeneratorSet) else list(gen)[-3:]
    K = [killing_field(x, p) for x in xis]
    m0 = moment(xis, p)
    lhs_nu, rhs_nu, res_mu = [], [], 0.0
    cyc = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    for e in _real_directions():
        mp = moment(xis, p + step * e)
        mm = moment(xis, p - step * e)
        mp2 = moment(xis, p + 2 * step * e)
        mm2 = moment(xis, p - 2 * step * e)
        dnu = (-mp2.nu + 8 * mp.nu - 8 * mm.nu + mm2.nu) / (12 * step)
        dmu = (-mp2.mu + 8 * mp.mu - 8 * mm.mu + mm2.mu) / (12 * step)
        lhs_nu.append(dnu)
        rhs_nu.append(sum(m0.mu[l] * nk_omega(p, K[l], e) for l in range(3)))
        for k, i, j in cyc:
            pred = -nk_omega(p, K[k], e) + 3 * np.real(nk_psi(p, K[i], K[j], e))
            res_mu = max(res_mu, abs(dmu[k] - pred))
    lhs_nu, rhs_nu = np.array(lhs_nu), np.array(rhs_nu)
    denom = float(rhs_nu @ rhs_nu)
    fitted = float(lhs_nu @ rhs_nu / denom) if denom > 1e-20 else float("nan")
    return {"nu_residual": float(np.abs(lhs_nu - factor * rhs_nu).max()),
            "mu_residual": float(res_mu),
            "dnu_norm": float(np.abs(lhs_nu).max()),
            "fitted_factor": fitted}


# ---------------------------------------------------------------------------
# Orbits, theta, special Lagrangian test

def orthonormal_tangent_basis(p, vectors, tol: float = 1e-9) -> List[np.ndarray]:
    """Modified Gram-Schmidt in the metric g, dropping dependent vectors."""
    basis: List[np.ndarray] = []
    scale = max([np.sqrt(metric_g(p, v, v)) for v in vectors] + [0.0])
    for v in vectors:
        w = np.array(v, dtype=complex)
        for b in basis:
            w = w - metric_g(p, w, b) * b
        nrm = np.sqrt(max(metric_g(p, w, w), 0.0))
        if scale > 0 and nrm > tol * scale:
            basis.append(w / nrm)
    return basis


def vertical_singular_values(p, onb) -> np.ndarray:
    """Singular values of the vertical projection restricted to span(onb)."""
    c3 = np.array([coframe(p, v)[2] for v in onb])
    M = np.array([c3.real, c3.imag])
    return np.linalg.svd(M, compute_uv=False)


def is_sl_orbit(gens, p, tol: float = 1e-9) -> tuple:
    """Whether the orbit of the group generated by gens through p is special Lagrangian."""
    xis = gens.xis if isinstance(gens, GeneratorSet) else list(gens)
    p = as_point(p)
    if len(xis) < 3:
        raise ValueError("need at least three generators")
    K = [killing_field(x, p) for x in xis]
    R = np.array([np.concatenate([k.real, k.imag]) for k in K])
    scale = max(float(np.abs(R).max()), 1.0)
    dim = rank_tol(R, 1e-8) if np.abs(R).max() > tol else 0
    diag = {"dimension": dim}
    if dim != 3:
        diag["reason"] = f"orbit dimension {dim} != 3"
        return False, diag
    pair = max(abs(nk_omega(p, a, b)) for a in K for b in K)
    diag["omega_pairing"] = pair
    onb = orthonormal_tangent_basis(p, K)
    vol = abs(nk_psi(p, *onb[:3]).imag)
    diag["im_psi_volume"] = vol
    ok = pair < tol * scale ** 2 and abs(vol - 1.0) < max(tol, 1e-8)
    if not ok:
        diag["reason"] = "not Lagrangian" if pair >= tol * scale ** 2 else "not special"
    return ok, diag


def theta_at(gens, p, tol: float = 1e-9) -> dict:
    """Orbit angle theta in [0, pi/4] with diagnostics.

    Also returns the ratio |w1| |omega_V(w2, w3)| / |Im psi(w1, w2, w3)| on an
    adapted basis (w1 spanning the kernel of the vertical projection), which
    equals |cos 2 theta| / 2.
    """
    xis = gens.xis if isinstance(gens, GeneratorSet) else list(gens)
    p = as_point(p)
    ok, diag = is_sl_orbit(xis, p, tol)
    if not ok:
        raise ValueError(f"orbit is not special Lagrangian at p: {diag.get('reason')}")
    K = [killing_field(x, p) for x in xis]
    onb = orthonormal_tangent_basis(p, K)[:3]
    sv = vertical_singular_values(p, onb)
    theta = theta_from_singular_values(sv)
    # adapted basis: w1 minimises the vertical part
    c3 = np.array([coframe(p, v)[2] for v in onb])
    M = np.array([c3.real, c3.imag])
    _, _, Vt = np.linalg.svd(M)
    W = [sum(Vt[r, a] * onb[a] for a in range(3)) for r in range(3)]
    w1, w2, w3 = W[2], W[0], W[1]
    ratio = abs(omega_vertical(p, w2, w3)) / abs(nk_psi(p, w1, w2, w3).imag)
    n_w = 2 if sv[1] < 1e-6 else 1
    return {"theta": theta, "singular_values": sv.tolist(), "half_abs_cos2theta": ratio,
            "n_w": n_w, **diag}


# ---------------------------------------------------------------------------
# Closed forms on slices (chart coordinates, this package's orientation)

def k1_f(h) -> float:
    h = np.asarray(h, dtype=complex)
    n = np.sum(np.abs(h) ** 2)
    return 0.25 * (-2 * (abs(h[0]) ** 2 + abs(h[1]) ** 2) + abs(h[2]) ** 2 + abs(h[3]) ** 2) / n


def k1_closed_form(h) -> MomentValue:
    h = np.asarray(h, dtype=complex)
    n = np.sum(np.abs(h) ** 2)
    f = k1_f(h)
    Z2, Z3 = h[2], h[3]
    mu1 = (abs(Z2) ** 2 - abs(Z3) ** 2) * f / n
    c = -2j * Z2 * np.conj(Z3) * f / n
    nu = -0.5 * (abs(h[0]) ** 2 + abs(h[1]) ** 2) * (abs(Z2) ** 2 + abs(Z3) ** 2) ** 2 / n ** 3
    return MomentValue(np.array([mu1, c.real, c.imag]), float(nu), np.full(3, np.nan), 0.0)


def k2_slice_mu(r: float, z3: complex) -> np.ndarray:
    """mu on Z1 = r >= 0, Z2 = 0, Z3 = z3."""
    t2 = abs(z3) ** 2
    n = 1 + r * r + t2
    mu1 = -0.5 * (-1 + r ** 4 + 4 * t2 - t2 ** 2) / n ** 2
    c = -r * z3 * (-2 + r * r + t2) / n ** 2  # mu2 - i mu3
    return np.array([mu1, c.real, -c.imag])


def k2_nu(h) -> float:
    h = np.asarray(h, dtype=complex)
    n = np.sum(np.abs(h) ** 2)
    return float(-abs(h[0] * h[1] + h[2] * h[3]) ** 2 / n ** 2)


def k3_slice_mu(r: float, s: float, phi: float = 0.0) -> np.ndarray:
    """mu on Z1 = s e^{i phi}, Z2 = r, Z3 = 0."""
    n = 1 + r * r + s * s
    m1 = 2 * (5 * r ** 4 - 4 * r * r * s * s - 16 * r * r - 3 * s ** 4 + 3) / n ** 2
    m2 = 4 * r * s * np.sin(phi) * (r * (SQRT3 * r - 9) + SQRT3 * (s * s - 8)) / n ** 2
    m3 = 4 * r * s * np.cos(phi) * (r * (-SQRT3 * r - 9) - SQRT3 * (s * s - 8)) / n ** 2
    return 0.25 * np.array([m1, m2, m3])


def slice_point(gen_id: str, coords) -> np.ndarray:
    """Homogeneous point for slice coordinates of a generator set."""
    g = gen_id.upper()
    if g == "K1":
        r, s = coords
        return np.array([1, s, r, 0], dtype=complex)
    if g.startswith("K2"):
        r, t = coords[:2]
        chi = coords[2] if len(coords) > 2 else 0.0
        return np.array([1, r, 0, t * np.exp(1j * chi)], dtype=complex)
    if g == "K3":
        r, s = coords[:2]
        phi = coords[2] if len(coords) > 2 else 0.0
        return np.array([1, s * np.exp(1j * phi), r, 0], dtype=complex)
    raise ValueError(f"unknown generator set {gen_id!r}")


def slice_mu(gen_id: str, coords) -> np.ndarray:
    g = gen_id.upper()
    if g == "K1":
        return k1_closed_form(slice_point("K1", coords)).mu
    if g.startswith("K2"):
        r, t = coords[:2]
        chi = coords[2] if len(coords) > 2 else 0.0
        return k2_slice_mu(r, t * np.exp(1j * chi))
    if g == "K3":
        return k3_slice_mu(*coords)
    raise ValueError(f"unknown generator set {gen_id!r}")


# ---------------------------------------------------------------------------
# Slice scans

@dataclass
class SliceRoot:
    group: str
    coords: tuple
    mu: np.ndarray
    nu: float
    iterations: int
    residual: float
    note: str = ""
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        d = {"group": self.group}
        names = {"K1": ("r", "s"), "K2": ("r", "t"), "K3": ("r", "s")}[self.group]
        for k, v in zip(names, self.coords):
            d[k] = v
        d.update({"mu1": self.mu[0], "mu2": self.mu[1], "mu3": self.mu[2], "nu": self.nu,
                  "polish_iterations": self.iterations, "residual": self.residual,
                  "note": self.note})
        return d


def _grid_minima(F: np.ndarray) -> List[tuple]:
    """Indices of grid points not exceeding any of their 8 neighbours."""
    n0, n1 = F.shape
    P = np.pad(F, 1, constant_values=np.inf)
    mask = np.ones_like(F, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= F <= P[1 + di:1 + di + n0, 1 + dj:1 + dj + n1]
    return list(zip(*np.nonzero(mask)))


def _polish(gen_id, x0, lo, hi):
    fun = lambda x: slice_mu(gen_id, tuple(x))
    sol = least_squares(fun, x0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        method="trf")
    return sol.x, sol.nfev, float(np.abs(sol.fun).max())


def _dedupe(roots, dist=1e-6):
    out = []
    for r in sorted(roots, key=lambda r: tuple(r.coords)):
        if all(np.linalg.norm(np.subtract(r.coords, o.coords)) > dist for o in out):
            out.append(r)
    return out


def scan_slice(gen_id: str, lo: float = 0.0, hi: float = 5.0, n: int = 400,
               tol: float = 1e-10) -> List[SliceRoot]:
    """Zeros of mu on the two-parameter slice of K2 or K3 over [lo, hi]^2.

    Candidates are the grid local minima of |mu| (roots may sit on the
    boundary of the slice, where sign changes degenerate); each is polished
    on the closed-form slice expression and kept if |mu| < tol.
    """
    g = gen_id.upper()
    if g.startswith("K2"):
        g = "K2"
    if g not in ("K2", "K3"):
        raise ValueError("two-parameter scans exist for K2 and K3; use scan_k1 for K1")
    if n < 2 or not hi > lo:
        raise ValueError("grid must have positive resolution and extent")
    xs = np.linspace(lo, hi, n)
    A, B = np.meshgrid(xs, xs, indexing="ij")
    if g == "K3":
        F = np.linalg.norm(np.array(k3_slice_mu(A, B)), axis=0)
    else:
        F = np.linalg.norm(np.array(k2_slice_mu(A, B + 0j)), axis=0)
    gens = generator_set(g)
    roots = []
    for i, j in _grid_minima(F):
        x, it, res = _polish(g, np.array([xs[i], xs[j]]), [lo, lo], [hi, hi])
        if res >= tol:
            continue
        h = slice_point(g, tuple(x))
        m = moment_hom(gens, h)
        roots.append(SliceRoot(g, tuple(float(v) for v in x), m.mu, m.nu, it, res))
    roots = _dedupe(roots)
    if g == "K2":
        _label_k2(roots)
    return roots


def k2_congruence(h) -> np.ndarray:
    """Isometry normalising K2: quaternionic j followed by the U(2) element [[0,-1],[1,0]]."""
    M = complex_entries(np.array([[0, -1], [1, 0]]))
    return M @ quaternionic_j(h)


def _label_k2(roots):
    for r in roots:
        rr, t = r.coords
        if rr > 1e-6:
            r.note = "P22"
        elif abs(t * t - (2 + SQRT3)) < 1e-6:
            r.note = "P21"
        else:
            img = k2_congruence(slice_point("K2", r.coords))
            img = img / img[0]
            r.note = "congruent to P21"
            r.extra["image"] = img.tolist()


def scan_k1(s_values=None, r_hi: float = 10.0, tol: float = 1e-12) -> List[SliceRoot]:
    """Zeros of mu on the K1 slice Z1 = s, Z2 = r > 0, Z3 = 0, one per sampled s."""
    from scipy.optimize import brentq
    if s_values is None:
        s_values = np.linspace(0.0, 3.0, 13)
    gens = k1_generators()
    roots = []
    for s in s_values:
        f = lambda r: slice_mu("K1", (r, s))[0] / max(r, 1e-300) ** 2
        grid = np.linspace(1e-3, r_hi, 2000)
        vals = np.array([f(r) for r in grid])
        for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if fa * fb < 0:
                r0 = brentq(f, a, b, xtol=1e-15, rtol=1e-15, full_output=True)
                r_root, info = r0
                h = slice_point("K1", (r_root, s))
                m = moment_hom(gens, h)
                res = float(np.abs(m.mu).max())
                if res < tol:
                    roots.append(SliceRoot("K1", (float(r_root), float(s)), m.mu, m.nu,
                                           info.iterations, res,
                                           extra={"f": k1_f(h)}))
    return roots


# ---------------------------------------------------------------------------
# Equivariance

def adjoint_rotation(gen: GeneratorSet, g: np.ndarray) -> np.ndarray:
    """R with g xi_j g^{-1} = sum_i R[i, j] xi_i for the su(2) triple."""
    t = gen.triple
    F = np.array([x.reshape(-1) for x in t]).T
    R = np.zeros((3, 3))
    for j, x in enumerate(t):
        y = (g @ x @ np.linalg.inv(g)).reshape(-1)
        c, *_ = np.linalg.lstsq(F, y, rcond=None)
        R[:, j] = c.real
    return R


def equivariance_residual(gen: GeneratorSet, h, g: np.ndarray) -> dict:
    """Compare mu(g h) with R mu(h) and nu(g h) with nu(h) for g in the subgroup."""
    h = np.asarray(h, dtype=complex)
    m0 = moment_hom(gen, h)
    m1 = moment_hom(gen, g @ h)
    R = adjoint_rotation(gen, g)
    return {"mu": float(np.abs(m1.mu - R @ m0.mu).max()),
            "nu": float(abs(m1.nu - m0.nu)),
            "rotation_orthogonality": float(np.abs(R.T @ R - np.eye(3)).max())}


def random_subgroup_element(gen: GeneratorSet, rng) -> np.ndarray:
    from .algebra import expm
    a = rng.normal(size=3)
    return expm(sum(ai * x for ai, x in zip(a, gen.triple)))


def random_hom_point(rng) -> np.ndarray:
    return rng.normal(size=4) + 1j * rng.normal(size=4)


