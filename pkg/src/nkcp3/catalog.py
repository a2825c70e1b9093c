"""Named homogeneous special Lagrangians, verified along two independent routes.

Orbit route: Killing fields of an su(2) action at a base point (moment maps,
angle, second fundamental form).  Structure route: the Lie algebra assembled
from the constants (theta, h) of the structure equations, whose orbit through
[1, 0, 0, 0] (the chart origin) is the same submanifold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import structure_eqs as se
from .chart import hom_to_chart
from .homogeneous import (cubic_invariants, induced_metric, infinitesimal_stabilizer_dim,
                          orbit_ricci, ricci_left_invariant, second_fundamental_form)
from .algebra import structure_constants
from .symmetry import generator_set, is_sl_orbit, k3_rep_to_chart, theta_at

ORIGIN = np.zeros(3, dtype=complex)

STABILIZER_DIM = {"SO(3)": 3, "SO(2)": 1, "S3": 0, "Z2": 0}

EXOTIC_RICCI = np.array([-99 / 50, -27 / 50 * (-2 + np.sqrt(15)), 27 / 50 * (2 + np.sqrt(15))])


@dataclass
class NamedExample:
    name: str
    gen_id: str
    hom_point: np.ndarray
    theta: float
    stabilizer: str
    symmetry_order: object  # int or "infinite"
    structure: Callable[[], se.BonnetResult]
    structure_theta: float
    totally_geodesic: bool = False
    ricci: Optional[np.ndarray] = None
    simply_transitive: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def chart_point(self) -> np.ndarray:
        return hom_to_chart(self.hom_point)


def _exotic():
    return se.assemble_bonnet(se.exotic_solution())


def _chiang():
    return se.assemble_bonnet(se.chiang_solution())


def _rp3():
    return se.assemble_bonnet(se.rp3_solution())


EXAMPLES = {
    "rp3": NamedExample("rp3", "K2", np.array([1, 1, 0, 0], dtype=complex), np.pi / 4, "SO(3)",
                        "infinite", _rp3, np.pi / 4, totally_geodesic=True),
    "berger": NamedExample("berger", "K1", np.array([1, 0, np.sqrt(2), 0], dtype=complex), 0.0,
                           "SO(2)", "infinite", lambda: se.theta0_bonnet(0.5), 0.0),
    "s1s2": NamedExample("s1s2", "K2_extended",
                         np.array([1, 0, 0, np.sqrt(2 + np.sqrt(3))], dtype=complex), 0.0,
                         "SO(2)", "infinite", lambda: se.theta0_bonnet(-1.0), 0.0,
                         simply_transitive=False),
    "chiang": NamedExample("chiang", "K3", k3_rep_to_chart([1, 0, 0, 1]), np.pi / 4, "S3", 6,
                           _chiang, np.pi / 4),
    "exotic": NamedExample("exotic", "K3", np.array([1, 0, 1 / np.sqrt(5), 0], dtype=complex),
                           se.EXOTIC_THETA, "Z2", 2, _exotic, se.EXOTIC_THETA,
                           ricci=EXOTIC_RICCI),
}


def example_names() -> List[str]:
    return list(EXAMPLES)


def _check(name, value, target, provenance, residual, tol):
    return {"name": name, "value": value, "target": target, "provenance": provenance,
            "residual": float(residual), "pass": bool(residual <= tol)}


def _as_list(v):
    return [float(x) for x in np.ravel(v)]


def orbit_route(ex: NamedExample, fd_step: float = 1e-3) -> dict:
    gens = generator_set(ex.gen_id)
    p = ex.chart_point
    ok, diag = is_sl_orbit(gens, p)
    th = theta_at(gens, p)
    sff = second_fundamental_form(gens, p, step=fd_step)
    inv = cubic_invariants(sff["cubic"])
    out = {"sl": ok, "sl_diag": diag, "theta": th["theta"], "sff": sff, "cubic": inv}
    if ex.simply_transitive:
        out["ricci"] = orbit_ricci(gens, p)["eigenvalues"]
    return out


def structure_route(ex: NamedExample, fd_step: float = 1e-3) -> dict:
    B = ex.structure()
    E = B.E
    ok, _ = is_sl_orbit(E, ORIGIN)
    th = theta_at(E, ORIGIN)
    sff = second_fundamental_form(E, ORIGIN, step=fd_step)
    resid = se.verify_structure_equations(E, ex.structure_theta)
    out = {"bonnet": B, "sl": ok, "theta": th["theta"], "norm2": float(np.sum(sff["cubic"] ** 2)),
           "structure": resid}
    if len(E) == 3:
        c, _ = structure_constants(E)
        out["ricci"] = ricci_left_invariant(c, induced_metric(E, ORIGIN))[1]
    return out


def verify_example(name: str, tol: float = 1e-8, fd_tol: float = 1e-4,
                   fd_step: float = 1e-3) -> List[dict]:
    """All checks for one named example; raises KeyError for unknown names."""
    ex = EXAMPLES[name]
    o = orbit_route(ex, fd_step)
    s = structure_route(ex, fd_step)
    checks = [
        _check("orbit_special_lagrangian", o["sl"], True, "DERIVED", 0.0 if o["sl"] else 1.0, 0.5),
        _check("orbit_theta", o["theta"], ex.theta, "TABLE", abs(o["theta"] - ex.theta), 1e-9),
        _check("mean_curvature", o["sff"]["mean_curvature"], 0.0, "DERIVED",
               o["sff"]["mean_curvature"], fd_tol),
        _check("cubic_symmetry_order", str(o["cubic"]["symmetry_order"]), str(ex.symmetry_order),
               "TABLE", 0.0 if o["cubic"]["symmetry_order"] == ex.symmetry_order else 1.0, 0.5),
    ]
    sdim = infinitesimal_stabilizer_dim(o["sff"]["cubic"])
    target = STABILIZER_DIM[ex.stabilizer]
    checks.append(_check("cubic_stabilizer_dim", sdim, target, "TABLE", abs(sdim - target), 0))
    ii = o["sff"]["ii_norm"]
    if ex.totally_geodesic:
        checks.append(_check("totally_geodesic", ii, 0.0, "TABLE", ii, fd_tol))
    else:
        checks.append(_check("not_totally_geodesic", ii, "> 0.1", "TABLE", max(0.0, 0.1 - ii), 0.0))
    checks += [
        _check("structure_special_lagrangian", s["sl"], True, "DERIVED", 0.0 if s["sl"] else 1.0, 0.5),
        _check("structure_connection_residual", s["bonnet"].connection_residual, 0.0, "DERIVED",
               s["bonnet"].connection_residual, tol),
        _check("bracket_closure", s["bonnet"].closure, 0.0, "DERIVED", s["bonnet"].closure, tol),
        _check("structure_equations", max(s["structure"].values()), 0.0, "DERIVED",
               max(s["structure"].values()), tol),
        _check("cross_route_theta", [o["theta"], s["theta"]], "equal", "DERIVED",
               abs(o["theta"] - s["theta"]), fd_tol),
        _check("cross_route_cubic_norm2", [o["cubic"]["norm2"], s["norm2"]], "equal", "DERIVED",
               abs(o["cubic"]["norm2"] - s["norm2"]), fd_tol),
    ]
    if "ricci" in o:
        if ex.ricci is not None:
            checks.append(_check("ricci_eigenvalues", _as_list(o["ricci"]), _as_list(ex.ricci),
                                 "TABLE", np.abs(o["ricci"] - ex.ricci).max(), 1e-6))
        if "ricci" in s:
            checks.append(_check("cross_route_ricci", _as_list(s["ricci"]), _as_list(o["ricci"]),
                                 "DERIVED", np.abs(o["ricci"] - s["ricci"]).max(), 1e-6))
    return checks
