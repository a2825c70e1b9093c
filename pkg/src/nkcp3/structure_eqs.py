"""Structure equations of special Lagrangians in the adapted (theta-gauge) frame.

The connection of the unitary coframe is A(rho1, rho2, tau); in the gauge
T_theta it becomes phi = T^{-1} A T + T^{-1} dT = alpha + i beta.  For a
homogeneous solution, beta(e_k) = h(., ., k) with h a symmetric trace-free
cubic, and the frame bundle is a Lie subgroup of Sp(2) whose algebra is
spanned by E_k = pack(rho1, rho2, tau evaluated on e_k; omega = T_theta e_k).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, NamedTuple, Sequence

import numpy as np
from scipy.optimize import least_squares

from .algebra import (QJ, SQRT2, Quaternion, bracket, closure_residual, connection_a, embed_c4,
                      flatten_sp2, pack_mc, span_projection, unpack_mc)
from .linear_model import t_theta

# Sign of the R, S terms in d alpha = -alpha^alpha + beta^beta - s R(sigma^sigma) and
# d beta = -beta^alpha - alpha^beta - s S(sigma^sigma).  The bracket relations of
# every closed solution require s = -1 with the tabulated R and S.
CURVATURE_SIGN = -1.0

EXOTIC_THETA = 0.5 * np.arccos(7 * SQRT2 / (5 * np.sqrt(5)))


class ConnectionValue(NamedTuple):
    rho1: float
    rho2: float
    tau: complex


@dataclass
class SolutionConstants:
    theta: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w: float = 0.0
    t: tuple = (0.0, 0.0, 0.0)

    @property
    def h(self) -> np.ndarray:
        return h_from_xyzw(self.x, self.y, self.z, self.w)

    def to_json(self) -> dict:
        h = self.h
        comps = {"".join(str(i + 1) for i in key): float(h[key])
                 for key in itertools.combinations_with_replacement(range(3), 3)}
        return {"theta": self.theta, "h": comps, "t": list(self.t),
                "xyzw": [self.x, self.y, self.z, self.w]}

    @staticmethod
    def from_json(d: dict) -> "SolutionConstants":
        if "xyzw" in d:
            x, y, z, w = d["xyzw"]
        else:
            h = d["h"]
            x, y, z, w = h["122"], h["222"], h["223"], h["123"]
        t = tuple(d.get("t", (0.0, 0.0, 0.0)))
        return SolutionConstants(float(d["theta"]), x, y, z, w, t)


def h_from_xyzw(x: float, y: float, z: float, w: float) -> np.ndarray:
    """Symmetric trace-free h with x = h221, y = h222, z = h322, w = h321."""
    vals = {(0, 0, 0): -2 * x, (0, 0, 1): -2 * y, (0, 0, 2): -2 * z, (0, 1, 1): x,
            (0, 1, 2): w, (0, 2, 2): x, (1, 1, 1): y, (1, 1, 2): z, (1, 2, 2): y,
            (2, 2, 2): z}
    h = np.zeros((3, 3, 3))
    for key, v in vals.items():
        for q in set(itertools.permutations(key)):
            h[q] = v
    return h


def h_norm2(x, y, z, w) -> float:
    return float(10 * x * x + 16 * y * y + 16 * z * z + 6 * w * w)


# ---------------------------------------------------------------------------
# Connection forms

def alpha_beta_from_connection(theta: float, cv: ConnectionValue, dtheta: float = 0.0):
    """(alpha, beta) with phi = T^{-1} A T + T^{-1} dT = alpha + i beta."""
    T = t_theta(theta)
    phi = np.linalg.solve(T, connection_a(cv.rho1, cv.rho2, cv.tau) @ T)
    phi = phi + np.diag([0, -1j, 1j]) * dtheta
    return phi.real, phi.imag


def printed_alpha_beta(theta: float, cv: ConnectionValue, dtheta: float = 0.0):
    """Lower triangle and diagonal of the displayed alpha, beta; the upper part
    is completed by antisymmetry (alpha) and symmetry (beta)."""
    r1, r2, tau = cv
    e, em = np.exp(1j * theta), np.exp(-1j * theta)
    a21 = np.real(1j * e * tau) / SQRT2
    a31 = np.real(em * tau) / SQRT2
    a32 = -0.5 * (3 * r1 + r2) * np.cos(2 * theta)
    b21 = np.imag(1j * e * tau) / SQRT2
    b31 = np.imag(em * tau) / SQRT2
    b32 = 0.5 * (3 * r1 + r2) * np.sin(2 * theta)
    alpha = np.array([[0, -a21, -a31], [a21, 0, -a32], [a31, a32, 0]])
    beta = np.array([[-r1 + r2, b21, b31],
                     [b21, 0.5 * (r1 - r2 - 2 * dtheta), b32],
                     [b31, b32, 0.5 * (r1 - r2 + 2 * dtheta)]])
    return alpha, beta


def printed_upper_entries(theta: float, cv: ConnectionValue) -> np.ndarray:
    """The (1,2), (1,3) entries of alpha and beta exactly as displayed (conj tau forms)."""
    r1, r2, tau = cv
    e, em = np.exp(1j * theta), np.exp(-1j * theta)
    tb = np.conj(tau)
    return np.array([np.real(1j * e * tb) / SQRT2, -np.real(em * tb) / SQRT2,
                     np.imag(1j * e * tb) / SQRT2, -np.imag(em * tb) / SQRT2])


def _wedge_table(theta: float):
    c, s2, s4 = np.cos(2 * theta), np.sin(2 * theta), np.sin(4 * theta)
    return c, s2, s4


def curvature_RS(theta: float):
    """Displayed R and S tables as arrays R[i, j, p, q], S[i, j, p, q] of coefficients of
    sigma_p ^ sigma_q (p < q stored, antisymmetric completion)."""
    c, s2, s4 = _wedge_table(theta)
    S = np.zeros((3, 3, 3, 3))
    R = np.zeros((3, 3, 3, 3))

    def put(M, i, j, p, q, v):
        M[i, j, p, q] += v
        M[i, j, q, p] -= v

    put(S, 0, 0, 1, 2, -c)
    put(S, 0, 1, 0, 2, -0.5 * c)
    put(S, 1, 0, 0, 2, -0.5 * c)
    put(S, 0, 2, 0, 1, 0.5 * c)
    put(S, 2, 0, 0, 1, 0.5 * c)
    put(S, 1, 1, 1, 2, 0.5 * c)
    put(S, 1, 2, 1, 2, 1.25 * s4)
    put(S, 2, 1, 1, 2, 1.25 * s4)
    put(S, 2, 2, 1, 2, 0.5 * c)
    put(R, 0, 1, 0, 1, 0.5)
    put(R, 0, 1, 0, 2, -0.5 * s2)
    put(R, 0, 2, 0, 2, 0.5)
    put(R, 0, 2, 0, 1, -0.5 * s2)
    put(R, 1, 0, 0, 2, 0.5 * s2)
    put(R, 1, 0, 0, 1, -0.5)
    put(R, 2, 0, 0, 1, 0.5 * s2)
    put(R, 2, 0, 0, 2, -0.5)
    put(R, 1, 2, 1, 2, 2.5 * c * c)
    put(R, 2, 1, 1, 2, -2.5 * c * c)
    return R, S


# ---------------------------------------------------------------------------
# Connection from h and assembly

def beta_linear_map(theta: float) -> np.ndarray:
    """6x4 matrix from (rho1, rho2, Re tau, Im tau) to the upper triangle of beta."""
    cols = []
    for u in np.eye(4):
        _, b = alpha_beta_from_connection(theta, ConnectionValue(u[0], u[1], u[2] + 1j * u[3]))
        cols.append([b[0, 0], b[0, 1], b[0, 2], b[1, 1], b[1, 2], b[2, 2]])
    return np.array(cols).T


def _upper(b):
    return np.array([b[0, 0], b[0, 1], b[0, 2], b[1, 1], b[1, 2], b[2, 2]])


def connection_from_beta(theta: float, beta_k: np.ndarray):
    """Least-squares (rho1, rho2, tau) on one direction with beta(e_k) = beta_k.

    The match uses all nine entries, so a non-symmetric beta_k shows up in the residual.
    """
    M = beta_linear_map(theta)
    beta_k = np.asarray(beta_k, dtype=float)
    rhs = _upper(beta_k)
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    cv = ConnectionValue(float(sol[0]), float(sol[1]), complex(sol[2], sol[3]))
    _, b = alpha_beta_from_connection(theta, cv)
    return cv, float(np.abs(b - beta_k).max())


def connection_from_h(sol: SolutionConstants, k: int):
    return connection_from_beta(sol.theta, sol.h[:, :, k])


def gauge_null_directions(theta: float, tol: float = 1e-10) -> List[np.ndarray]:
    """sp(2) elements (pure connection part) that do not change beta: the unfixed freedom."""
    M = beta_linear_map(theta)
    _, sv, Vt = np.linalg.svd(M)
    rank = int(np.sum(sv > tol))
    return [pack_mc(v[0], v[1], v[2] + 1j * v[3], np.zeros(3)) for v in Vt[rank:]]


def closure_vector(basis: Sequence[np.ndarray]) -> np.ndarray:
    """Stacked residuals of projecting all pairwise brackets onto span(basis)."""
    F = np.array([flatten_sp2(e) for e in basis]).T
    out = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            v = flatten_sp2(bracket(basis[i], basis[j]))
            c, *_ = np.linalg.lstsq(F, v, rcond=None)
            out.append(F @ c - v)
    return np.concatenate(out) if out else np.zeros(0)


@dataclass
class BonnetResult:
    E: List[np.ndarray]
    connection_residual: float
    closure: float
    gauge: list = field(default_factory=list)


def _raw_generators(theta: float, beta_table: Sequence[np.ndarray]):
    T = t_theta(theta)
    E, res = [], 0.0
    for k in range(3):
        cv, r = connection_from_beta(theta, beta_table[k])
        res = max(res, r)
        E.append(pack_mc(cv.rho1, cv.rho2, cv.tau, T @ np.eye(3)[:, k]))
    return E, res


def assemble_bonnet(sol: SolutionConstants, starts: int = 8, seed: int = 0) -> BonnetResult:
    """sp(2) triple of a homogeneous solution and its bracket-closure residual.

    Where beta does not determine the connection (theta = pi/4) the free part
    is fixed by requiring bracket closure, i.e. by the structure equations.
    """
    if any(abs(t) > 0 for t in sol.t):
        raise ValueError("only homogeneous candidates (dtheta = 0) can be assembled")
    h = sol.h
    return assemble_from_beta(sol.theta, [h[:, :, k] for k in range(3)], starts, seed)


def assemble_from_beta(theta: float, beta_table, starts: int = 8, seed: int = 0) -> BonnetResult:
    E, res = _raw_generators(theta, beta_table)
    null = gauge_null_directions(theta)
    if not null:
        return BonnetResult(E, res, closure_residual(E))
    m = len(null)

    def shifted(c):
        return [E[k] + sum(c[m * k + a] * null[a] for a in range(m)) for k in range(3)]

    rng = np.random.default_rng(seed)
    best = None
    for s in range(starts):
        x0 = np.zeros(3 * m) if s == 0 else rng.normal(size=3 * m)
        fit = least_squares(lambda c: closure_vector(shifted(c)), x0,
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or fit.cost < best.cost:
            best = fit
    En = shifted(best.x)
    return BonnetResult(En, res, closure_residual(En), [float(v) for v in best.x])


# ---------------------------------------------------------------------------
# theta = 0 family

def solve_f_roots():
    """Roots of -1 + f + 2 f^2, ascending."""
    r = np.roots([2.0, 1.0, -1.0])
    return tuple(sorted(float(np.real(v)) for v in r))


def theta0_generators(f: float) -> List[np.ndarray]:
    """The four displayed generators spanning the theta = 0 algebras."""
    s = SQRT2
    jq = lambda c: Quaternion(0, c)  # j * c
    m1 = embed_c4([[1j, 0], [0, 1j]])
    m2 = embed_c4([[1j * f / s, -1], [1, -1j * f / s]])
    m3 = embed_c4([[jq(-1), jq(-1j / s)], [jq(-1j / s), jq(f)]])
    m4 = embed_c4([[jq(-1j), jq(1 / s)], [jq(1 / s), jq(1j * f)]])
    return [m1, m2, m3, m4]


def theta0_isotropy() -> np.ndarray:
    """Stabiliser direction of the theta = 0 frames: rho1 = rho2 = 1, all else 0."""
    return pack_mc(1, 1, 0, np.zeros(3))


def theta0_beta_table(f: float, beta31_has_f: bool = True):
    """beta(e_k) for the theta = 0 ansatz; the alternative reading drops f from beta31."""
    b31 = 0.5 * f if beta31_has_f else 0.5
    tables = []
    for k in range(3):
        b = np.zeros((3, 3))
        if k == 0:
            b[0, 0], b[1, 1], b[2, 2] = -f, 0.5 * f, 0.5 * f
        elif k == 1:
            b[0, 1] = b[1, 0] = 0.5 * f
        else:
            b[0, 2] = b[2, 0] = b31
        tables.append(b)
    return tables


def theta0_bonnet(f: float, beta31_has_f: bool = True) -> BonnetResult:
    # the free direction of the connection is the isotropy itself, so no gauge fit
    E, res = _raw_generators(0.0, theta0_beta_table(f, beta31_has_f))
    E = E + [theta0_isotropy()]
    return BonnetResult(E, res, closure_residual(E))


# ---------------------------------------------------------------------------
# Named solutions

def exotic_solution() -> SolutionConstants:
    return SolutionConstants(EXOTIC_THETA, -np.sqrt(2 / 5), 0.0, 0.0, -0.6 * np.sqrt(1.5))


def chiang_solution() -> SolutionConstants:
    """A representative of the one-parameter family (x, y, -y, -x) with |h|^2 = 8/3."""
    return SolutionConstants(np.pi / 4, 1 / np.sqrt(6), 0.0, 0.0, -1 / np.sqrt(6))


def rp3_solution() -> SolutionConstants:
    return SolutionConstants(np.pi / 4)


def rp3_standard_algebra() -> List[np.ndarray]:
    """Matrices with entries in R + jR spanning the standard RP^3 algebra."""
    return [embed_c4([[QJ, 0], [0, Quaternion(0, -1)]]),
            embed_c4([[0, -1], [1, 0]]),
            embed_c4([[0, QJ], [QJ, 0]])]


def isotropy_generators() -> List[np.ndarray]:
    """Algebra of the stabiliser of [1, 0, 0, 0] within sp(2)."""
    return [pack_mc(1, 0, 0, np.zeros(3)), pack_mc(0, 1, 0, np.zeros(3)),
            pack_mc(0, 0, 1, np.zeros(3)), pack_mc(0, 0, 1j, np.zeros(3))]


def conjugate_into_span(E, target, starts: int = 30, seed: int = 0) -> dict:
    """Search an isotropy element g with g E g^{-1} inside span(target)."""
    from .algebra import expm
    gens = isotropy_generators()
    F = np.array([flatten_sp2(e) for e in target]).T

    def resid(p):
        g = expm(sum(p[i] * gens[i] for i in range(4)))
        gi = np.linalg.inv(g)
        out = []
        for e in E:
            v = flatten_sp2(g @ e @ gi)
            c, *_ = np.linalg.lstsq(F, v, rcond=None)
            out.append(F @ c - v)
        return np.concatenate(out)

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        fit = least_squares(resid, rng.normal(size=4) * 2, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if best is None or fit.cost < best.cost:
            best = fit
    return {"residual": float(np.abs(best.fun).max()), "params": best.x.tolist()}


def search_pi4_solutions(starts: int = 20, seed: int = 0, tol: float = 1e-9) -> List[dict]:
    """Random-start search for closed triples at theta = pi/4 over (x, y, z, w, gauge)."""
    theta = np.pi / 4
    null = gauge_null_directions(theta)
    m = len(null)
    rng = np.random.default_rng(seed)
    out = []

    def triple(p):
        x, y, z, w = p[:4]
        h = h_from_xyzw(x, y, z, w)
        E, _ = _raw_generators(theta, [h[:, :, k] for k in range(3)])
        c = p[4:]
        return [E[k] + sum(c[m * k + a] * null[a] for a in range(m)) for k in range(3)]

    for _ in range(starts):
        fit = least_squares(lambda p: closure_vector(triple(p)), rng.normal(size=4 + 3 * m),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.abs(fit.fun).max() < tol:
            x, y, z, w = fit.x[:4]
            out.append({"xyzw": [float(v) for v in fit.x[:4]], "gauge": fit.x[4:].tolist(),
                        "h_norm2": h_norm2(x, y, z, w)})
    return out


# ---------------------------------------------------------------------------
# Structure equation verification

@dataclass
class FormValues:
    rho1: float
    rho2: float
    tau: complex
    sigma: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    eta: float  # |Im sigma|, must vanish on the adapted bundle


def form_values(X: np.ndarray, theta: float) -> FormValues:
    c = unpack_mc(X)
    T = t_theta(theta)
    sig = np.linalg.solve(T, c.omega)
    a, b = alpha_beta_from_connection(theta, ConnectionValue(c.rho1, c.rho2, c.tau))
    return FormValues(c.rho1, c.rho2, c.tau, sig.real, a, b, float(np.abs(sig.imag).max()))


def _cross(s):
    return np.array([[0, s[2], -s[1]], [-s[2], 0, s[0]], [s[1], -s[0], 0]])


def verify_structure_equations(E: Sequence[np.ndarray], theta: float,
                               curvature_sign: float = CURVATURE_SIGN) -> dict:
    """Max residual of each differential identity on the algebra spanned by E.

    Exterior derivatives of left-invariant forms use d lam(X, Y) = -lam([X, Y]),
    with [X, Y] projected onto span(E) so that non-closure is visible.
    """
    c2 = np.cos(2 * theta)
    e, em = np.exp(1j * theta), np.exp(-1j * theta)
    eps1 = lambda t: 1j / (2 * SQRT2) * (e * t - em * np.conj(t))
    eps2 = lambda t: 1 / (2 * SQRT2) * (em * t + e * np.conj(t))
    R, S = curvature_RS(theta)
    worst = {k: 0.0 for k in ("rho1", "rho2", "tau", "sigma1", "sigma2", "sigma3",
                              "dsigma", "alpha", "beta", "beta_wedge_sigma", "eta", "closure")}
    if abs(theta) < 1e-14:
        worst["gamma"] = 0.0
    fv = [form_values(X, theta) for X in E]
    for v in fv:
        worst["eta"] = max(worst["eta"], v.eta)
    for a in range(len(E)):
        for b in range(a + 1, len(E)):
            x, y = fv[a], fv[b]
            coef, dist = span_projection(E, bracket(E[a], E[b]))
            worst["closure"] = max(worst["closure"], dist)
            B = form_values(sum(coef[k] * E[k] for k in range(len(E))), theta)
            w = lambda p, q: p[0] * q[1] - p[1] * q[0]
            sx, sy = x.sigma, y.sigma
            S12 = w((sx[0], sy[0]), (sx[1], sy[1]))
            S13 = w((sx[0], sy[0]), (sx[2], sy[2]))
            S23 = w((sx[1], sy[1]), (sx[2], sy[2]))
            g3 = (3 * x.rho1 + x.rho2, 3 * y.rho1 + y.rho2)
            checks = {
                "rho1": -B.rho1 - 1.5 * c2 * S23,
                "rho2": -B.rho2 - (0.5 * c2 * S23
                                   + 1j * w((x.tau, y.tau), (np.conj(x.tau), np.conj(y.tau)))),
                "tau": -B.tau - (-2j * w((x.tau, y.tau), (x.rho2, y.rho2))
                                 + (1j * em * S12 - e * S13) / SQRT2),
                "sigma1": -B.sigma[0] - (w((eps1(x.tau), eps1(y.tau)), (sx[1], sy[1]))
                                         + w((eps2(x.tau), eps2(y.tau)), (sx[2], sy[2])) + S23),
                "sigma2": -B.sigma[1] - (-0.5 * c2 * w(g3, (sx[2], sy[2]))
                                         - w((eps1(x.tau), eps1(y.tau)), (sx[0], sy[0])) - S13),
                "sigma3": -B.sigma[2] - (0.5 * c2 * w(g3, (sx[1], sy[1]))
                                         - w((eps2(x.tau), eps2(y.tau)), (sx[0], sy[0])) + S12),
            }
            for k, v in checks.items():
                worst[k] = max(worst[k], float(abs(v)))
            # d sigma = -alpha ^ sigma - 1/2 [sigma] ^ sigma
            ds = -(x.alpha @ sy - y.alpha @ sx) - 0.5 * (_cross(sx) @ sy - _cross(sy) @ sx)
            worst["dsigma"] = max(worst["dsigma"], float(np.abs(-B.sigma - ds).max()))
            ss = np.array([[sx[p] * sy[q] - sx[q] * sy[p] for q in range(3)] for p in range(3)])
            Rv = 0.5 * np.einsum("ijpq,pq->ij", R, ss)
            Sv = 0.5 * np.einsum("ijpq,pq->ij", S, ss)
            da = -(x.alpha @ y.alpha - y.alpha @ x.alpha) + (x.beta @ y.beta - y.beta @ x.beta) \
                - curvature_sign * Rv
            db = -(x.beta @ y.alpha - y.beta @ x.alpha) - (x.alpha @ y.beta - y.alpha @ x.beta) \
                - curvature_sign * Sv
            worst["alpha"] = max(worst["alpha"], float(np.abs(-B.alpha - da).max()))
            worst["beta"] = max(worst["beta"], float(np.abs(-B.beta - db).max()))
            bws = x.beta @ sy - y.beta @ sx
            worst["beta_wedge_sigma"] = max(worst["beta_wedge_sigma"], float(np.abs(bws).max()))
            if "gamma" in worst:
                # d gamma = (5 - f)/2 sigma2 ^ sigma3 with gamma = rho1 + rho2 and f from beta
                f = _theta0_f(fv)
                gam = -(B.rho1 + B.rho2) - 0.5 * (5 - f) * S23
                worst["gamma"] = max(worst["gamma"], float(abs(gam)))
    return worst


def _theta0_f(fv) -> float:
    # beta22 = f/2 sigma1 on the direction with sigma = e1
    for v in fv:
        if abs(v.sigma[0]) > 0.5:
            return float(2 * v.beta[1, 1] / v.sigma[0])
    return float("nan")


def beta_table_symmetry(beta_table) -> float:
    """Max |h_ijk - h_sigma(ijk)| for h_ijk = beta(e_k)_ij; zero iff h is totally symmetric."""
    h = np.stack([np.asarray(b, dtype=float) for b in beta_table], axis=2)
    return float(max(np.abs(h - h.transpose(p)).max() for p in itertools.permutations(range(3))))
