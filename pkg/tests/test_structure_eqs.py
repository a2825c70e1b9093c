import numpy as np
import pytest

from nkcp3.algebra import closure_residual, flatten_sp2, rank_tol
from nkcp3.homogeneous import second_fundamental_form
from nkcp3.structure_eqs import (EXOTIC_THETA, ConnectionValue, SolutionConstants,
                                 alpha_beta_from_connection, assemble_bonnet,
                                 beta_table_symmetry, chiang_solution, conjugate_into_span,
                                 connection_from_h, curvature_RS, exotic_solution, form_values,
                                 gauge_null_directions, h_from_xyzw, h_norm2,
                                 printed_alpha_beta, printed_upper_entries, rp3_solution,
                                 rp3_standard_algebra, search_pi4_solutions, solve_f_roots,
                                 theta0_beta_table, theta0_bonnet, theta0_generators,
                                 verify_structure_equations)

ORIGIN = np.zeros(3)


def test_h_is_symmetric_trace_free():
    rng = np.random.default_rng(0)
    x, y, z, w = rng.normal(size=4)
    h = h_from_xyzw(x, y, z, w)
    assert beta_table_symmetry([h[:, :, k] for k in range(3)]) == 0
    assert np.abs(np.einsum("iik->k", h)).max() < 1e-15
    assert np.sum(h * h) == pytest.approx(h_norm2(x, y, z, w))


def test_solution_json_roundtrip():
    s = exotic_solution()
    t = SolutionConstants.from_json(s.to_json())
    assert np.allclose(t.h, s.h) and t.theta == s.theta


def test_connection_forms_entries():
    rng = np.random.default_rng(1)
    for _ in range(5):
        th, dth = rng.uniform(0, 1), rng.normal()
        cv = ConnectionValue(rng.normal(), rng.normal(), complex(*rng.normal(size=2)))
        a, b = alpha_beta_from_connection(th, cv, dth)
        assert np.allclose(a, -a.T) and np.allclose(b, b.T)
        pa, pb = printed_alpha_beta(th, cv, dth)
        assert np.abs(a - pa).max() < 1e-14 and np.abs(b - pb).max() < 1e-14


def test_displayed_upper_entries_are_not_the_completion():
    cv = ConnectionValue(0.2, -0.4, 0.7 + 0.3j)
    a, b = alpha_beta_from_connection(0.3, cv)
    shown = printed_upper_entries(0.3, cv)
    assert np.abs(shown - [a[0, 1], a[0, 2], b[0, 1], b[0, 2]]).max() > 0.1


def test_curvature_tables_symmetry_type():
    rng = np.random.default_rng(2)
    R, S = curvature_RS(rng.uniform(0, 1))
    assert np.allclose(R, -np.transpose(R, (1, 0, 2, 3)))
    assert np.allclose(S, np.transpose(S, (1, 0, 2, 3)))
    assert np.allclose(R, -np.transpose(R, (0, 1, 3, 2)))
    assert np.abs(np.einsum("iipq->pq", S)).max() < 1e-15


def test_exotic_solution():
    s = exotic_solution()
    for k in range(3):
        _, res = connection_from_h(s, k)
        assert res < 1e-12
    B = assemble_bonnet(s)
    assert B.closure < 1e-10
    v = verify_structure_equations(B.E, s.theta)
    assert max(v.values()) < 1e-9
    assert not B.gauge  # connection fully determined away from theta = 0, pi/4


def test_exotic_perturbation_breaks_closure():
    s = exotic_solution()
    s.w += 0.01
    assert assemble_bonnet(s).closure > 0.01


def test_curvature_sign_is_detected():
    s = exotic_solution()
    B = assemble_bonnet(s)
    v = verify_structure_equations(B.E, s.theta, curvature_sign=1.0)
    assert v["alpha"] > 0.1 and v["beta"] > 0.1


def test_cubic_form_equals_minus_h_on_adapted_frame():
    s = exotic_solution()
    B = assemble_bonnet(s)
    C = second_fundamental_form(B.E, ORIGIN)["cubic"]
    assert np.abs(C + s.h).max() < 1e-9


def test_gauge_freedom_dimensions():
    assert len(gauge_null_directions(0.0)) == 1
    assert len(gauge_null_directions(0.3)) == 0
    assert len(gauge_null_directions(np.pi / 4)) == 1


def test_f_roots():
    assert solve_f_roots() == (-1.0, 0.5)


@pytest.mark.parametrize("f", [-1.0, 0.5])
def test_theta0_algebras_close(f):
    assert closure_residual(theta0_generators(f)) < 1e-12
    B = theta0_bonnet(f)
    assert B.closure < 1e-12
    assert max(verify_structure_equations(B.E, 0.0).values()) < 1e-12
    # both descriptions span the same four-dimensional algebra
    F = np.array([flatten_sp2(x) for x in theta0_generators(f) + B.E])
    assert rank_tol(F, 1e-10) == 4


@pytest.mark.parametrize("f", [-1.0, 0.5])
def test_theta0_relations(f):
    for X in theta0_bonnet(f).E[:3]:
        v = form_values(X, 0.0)
        s, g = v.sigma, v.rho1 + v.rho2
        assert abs(v.alpha[1, 0] + 0.5 * f * s[2]) < 1e-14
        assert abs(v.alpha[2, 0] - 0.5 * f * s[1]) < 1e-14
        assert abs(v.alpha[2, 1] + g + 0.5 * f * s[0]) < 1e-14
        assert abs(f * s[0] - (v.rho1 - v.rho2)) < 1e-14
        assert abs(v.tau - f * (s[1] + 1j * s[2]) / np.sqrt(2)) < 1e-14


@pytest.mark.parametrize("f", [0.0, 1.0, 0.3])
def test_theta0_fails_off_roots(f):
    assert closure_residual(theta0_generators(f)) > 0.1
    assert theta0_bonnet(f).closure > 0.1


@pytest.mark.parametrize("f", [-1.0, 0.5])
def test_beta31_without_f_is_inconsistent(f):
    assert beta_table_symmetry(theta0_beta_table(f, beta31_has_f=True)) == 0
    assert beta_table_symmetry(theta0_beta_table(f, beta31_has_f=False)) > 0.1
    assert theta0_bonnet(f, beta31_has_f=False).closure > 0.1


def test_rp3_and_chiang_solutions():
    for s in (rp3_solution(), chiang_solution()):
        B = assemble_bonnet(s)
        assert B.closure < 1e-10
        assert max(verify_structure_equations(B.E, s.theta).values()) < 1e-9
    assert h_norm2(1 / np.sqrt(6), 0, 0, -1 / np.sqrt(6)) == pytest.approx(8 / 3)


def test_rp3_algebra_is_conjugate_to_standard():
    B = assemble_bonnet(rp3_solution())
    assert closure_residual(rp3_standard_algebra()) < 1e-14
    assert conjugate_into_span(B.E, rp3_standard_algebra())["residual"] < 1e-10


def test_pi4_search_finds_only_two_norms():
    sols = search_pi4_solutions(starts=8, seed=1)
    assert sols
    norms = {round(s["h_norm2"], 6) for s in sols}
    assert norms <= {0.0, round(8 / 3, 6)}


def test_dtheta_candidates_rejected():
    s = SolutionConstants(0.3, t=(0.1, 0.0, 0.0))
    with pytest.raises(ValueError):
        assemble_bonnet(s)


def test_exotic_theta_value():
    assert EXOTIC_THETA == pytest.approx(0.5 * np.arccos(7 * np.sqrt(2) / (5 * np.sqrt(5))))
    assert EXOTIC_THETA == pytest.approx(0.241680641106, abs=1e-12)
