import numpy as np
import pytest

from nkcp3.algebra import expm
from nkcp3.chart import chart_to_hom, hom_to_chart
from nkcp3.symmetry import (DNU_FACTOR, dnu_identity_residual, equivariance_residual,
                            generator_invariants, generator_set, is_sl_orbit, k1_closed_form,
                            k2_congruence, k3_derivatives, k3_matrix, k3_rep_to_chart,
                            killing_derivative, killing_field, moment, moment_hom,
                            random_hom_point, random_subgroup_element, scan_k1, scan_slice,
                            slice_mu, slice_point, theta_at)

GROUPS = ("K1", "K2", "K3")
SQ23 = np.sqrt(2 + np.sqrt(3))


def rand_point(rng, scale=0.7):
    return scale * (rng.normal(size=3) + 1j * rng.normal(size=3))


@pytest.mark.parametrize("gid", GROUPS + ("K2_extended",))
def test_generator_invariants(gid):
    inv = generator_invariants(generator_set(gid))
    assert max(inv.values()) < 1e-14


def test_unknown_generator_set():
    with pytest.raises(ValueError):
        generator_set("K9")
    with pytest.raises(ValueError):
        slice_point("K9", (0, 0))


def test_k3_representation():
    rng = np.random.default_rng(0)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    a, b = v[:2] / np.linalg.norm(v[:2])
    U = k3_matrix(a, b)
    assert np.abs(U.conj().T @ U - np.eye(4)).max() < 1e-13
    t = 1e-6
    D1, D2, D3 = k3_derivatives()
    c, s = np.cos(t), np.sin(t)
    for D, (ap, bp), (am, bm) in ((D1, (np.exp(1j * t), 0), (np.exp(-1j * t), 0)),
                                  (D2, (c, s), (c, -s)), (D3, (c, 1j * s), (c, -1j * s))):
        fd = (k3_matrix(ap, bp) - k3_matrix(am, bm)) / (2 * t)
        assert np.abs(fd - D).max() < 1e-8


def test_killing_field_is_flow_derivative():
    rng = np.random.default_rng(1)
    for gid in GROUPS:
        for xi in generator_set(gid).xis:
            p = rand_point(rng)
            t = 1e-5
            fwd = hom_to_chart(expm(t * xi) @ chart_to_hom(p))
            bwd = hom_to_chart(expm(-t * xi) @ chart_to_hom(p))
            assert np.abs((fwd - bwd) / (2 * t) - killing_field(xi, p)).max() < 1e-8
            v = rand_point(rng)
            h = 1e-5
            fd = (killing_field(xi, p + h * v) - killing_field(xi, p - h * v)) / (2 * h)
            assert np.abs(fd - killing_derivative(xi, p, v)).max() < 1e-8


@pytest.mark.parametrize("gid", GROUPS)
def test_moment_identities(gid):
    rng = np.random.default_rng(2)
    gen = generator_set(gid)
    for _ in range(5):
        p = rand_point(rng)
        r = dnu_identity_residual(gen, p)
        assert r["nu_residual"] < 1e-7 and r["mu_residual"] < 1e-7
        assert abs(r["fitted_factor"] - DNU_FACTOR) < 1e-5
        assert abs(moment(gen, p).re_psi) < 1e-10


def test_dnu_rejects_bad_step():
    with pytest.raises(ValueError):
        dnu_identity_residual(generator_set("K1"), np.zeros(3), step=0)


@pytest.mark.parametrize("gid", GROUPS)
def test_equivariance(gid):
    rng = np.random.default_rng(3)
    gen = generator_set(gid)
    for _ in range(5):
        e = equivariance_residual(gen, random_hom_point(rng), random_subgroup_element(gen, rng))
        assert max(e.values()) < 1e-10


def test_slice_closed_forms_match_contraction():
    rng = np.random.default_rng(4)
    for gid, n in (("K1", 2), ("K2", 3), ("K3", 3)):
        for _ in range(5):
            c = tuple(rng.uniform(0.1, 2, size=n))
            direct = moment_hom(generator_set(gid), slice_point(gid, c)).mu
            assert np.abs(slice_mu(gid, c) - direct).max() < 1e-12
    h = slice_point("K1", (0.4, 1.3))
    cf, direct = k1_closed_form(h), moment_hom(generator_set("K1"), h)
    assert np.abs(cf.mu - direct.mu).max() < 1e-13 and abs(cf.nu - direct.nu) < 1e-13


def test_k3_extremal_nu_values():
    gen = generator_set("K3")
    chiang = hom_to_chart(k3_rep_to_chart([1, 0, 0, 1]))
    exotic = np.array([0, 1 / np.sqrt(5), 0])
    assert abs(moment(gen, chiang).nu + 9 / 4) < 1e-12
    assert abs(moment(gen, exotic).nu - 25 / 27) < 1e-12
    # doubling the generators scales nu by 8
    doubled = [2 * x for x in gen.triple]
    assert abs(moment(doubled, chiang).nu + 18) < 1e-11
    assert abs(moment(doubled, exotic).nu - 200 / 27) < 1e-11


def test_scan_k3_roots():
    roots = scan_slice("K3")
    got = sorted(r.coords for r in roots)
    want = sorted([(0.0, 1.0), (1 / np.sqrt(5), 0.0), (np.sqrt(3), 0.0)])
    assert len(got) == 3
    assert np.abs(np.array(got) - np.array(want)).max() < 1e-8


def test_scan_k2_roots_and_congruence():
    roots = scan_slice("K2")
    notes = sorted(r.note for r in roots)
    assert notes == ["P21", "P22", "congruent to P21"]
    for r in roots:
        if r.note == "P21":
            assert abs(r.coords[1] - SQ23) < 1e-8 and abs(r.coords[0]) < 1e-8
        if r.note == "P22":
            assert abs(r.coords[0] - 1) < 1e-8 and abs(r.coords[1]) < 1e-8
        if r.note.startswith("congruent"):
            img = np.array(r.extra["image"])
            assert abs(abs(img[3]) - SQ23) < 1e-8
    # the congruence is an isometry normalising K2: it preserves nu
    gen = generator_set("K2")
    h = slice_point("K2", (0.3, 0.8))
    assert abs(moment_hom(gen, k2_congruence(h)).nu - moment_hom(gen, h).nu) < 1e-12


def test_scan_k1_has_f_zero():
    roots = scan_k1(np.linspace(0, 2, 5))
    assert len(roots) == 5
    for r in roots:
        assert abs(r.extra["f"]) < 1e-12 and np.abs(r.mu).max() < 1e-12


def test_scan_argument_errors():
    with pytest.raises(ValueError):
        scan_slice("K1")
    with pytest.raises(ValueError):
        scan_slice("K3", n=1)


def test_non_orbit_is_rejected():
    rng = np.random.default_rng(5)
    ok, diag = is_sl_orbit(generator_set("K2"), rand_point(rng))
    assert not ok and "reason" in diag
    with pytest.raises(ValueError):
        theta_at(generator_set("K2"), rand_point(rng))
    with pytest.raises(ValueError):
        is_sl_orbit(generator_set("K2").xis[:2], rand_point(rng))
