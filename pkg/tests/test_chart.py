import numpy as np
import pytest

from nkcp3.algebra import JQ, is_sp2
from nkcp3.chart import (almost_complex_j, as_point, chart_to_hom, coframe, gram, hom_to_chart,
                         mc_pullback_fd, metric_g, move_into_chart, nk_omega, nk_psi,
                         omega_horizontal, omega_vertical, quaternionic_j, section_s,
                         vector_from_coframe)

RNG = np.random.default_rng(7)


def rand_c3(rng, scale=1.0):
    return scale * (rng.normal(size=3) + 1j * rng.normal(size=3))


def d_fd(f, p, v, h=1e-4):
    return (-f(p + 2 * h * v) + 8 * f(p + h * v) - 8 * f(p - h * v) + f(p - 2 * h * v)) / (12 * h)


def test_chart_roundtrip_and_errors():
    p = rand_c3(RNG)
    assert np.allclose(hom_to_chart(chart_to_hom(p) * (2 - 1j)), p)
    with pytest.raises(ValueError):
        hom_to_chart([0, 1, 0, 0])
    with pytest.raises(ValueError):
        hom_to_chart([0, 0, 0, 0])
    with pytest.raises(ValueError):
        as_point([1, 2])
    with pytest.raises(ValueError):
        as_point([np.nan, 0, 0])


def test_section_lies_in_sp2_over_the_point():
    for _ in range(5):
        p = rand_c3(RNG)
        S = section_s(p)
        assert np.abs(S.conj().T @ S - np.eye(4)).max() < 1e-12
        col = S[:, 0]
        assert np.allclose(col / col[0], chart_to_hom(p))
        # the group element itself satisfies the quaternionic condition
        assert np.abs(S @ JQ - JQ @ S.conj()).max() < 1e-12


def test_coframe_matches_maurer_cartan_pullback():
    for _ in range(10):
        p, v = rand_c3(RNG, 0.8), rand_c3(RNG)
        assert np.abs(mc_pullback_fd(p, v).omega - coframe(p, v)).max() < 1e-8


def test_coframe_type():
    p, v = rand_c3(RNG), rand_c3(RNG)
    c, ci = coframe(p, v), coframe(p, 1j * v)
    assert np.allclose(ci[:2], 1j * c[:2])
    assert np.allclose(ci[2], -1j * c[2])
    assert np.allclose(vector_from_coframe(p, c), v)


def test_almost_complex_structure():
    p, X, Y = rand_c3(RNG), rand_c3(RNG), rand_c3(RNG)
    JX = almost_complex_j(p, X)
    assert np.allclose(almost_complex_j(p, JX), -X)
    assert abs(metric_g(p, JX, almost_complex_j(p, Y)) - metric_g(p, X, Y)) < 1e-12
    assert abs(nk_omega(p, X, Y) - metric_g(p, JX, Y)) < 1e-12
    assert abs(nk_omega(p, X, Y) - omega_vertical(p, X, Y) - omega_horizontal(p, X, Y)) < 1e-14


def test_nearly_kaehler_differential_identities():
    rng = np.random.default_rng(8)
    for _ in range(3):
        p = rand_c3(rng, 0.7)
        X, Y, Z, W = (rand_c3(rng) for _ in range(4))
        dw = (d_fd(lambda q: nk_omega(q, Y, Z), p, X) - d_fd(lambda q: nk_omega(q, X, Z), p, Y)
              + d_fd(lambda q: nk_omega(q, X, Y), p, Z))
        assert abs(dw - 3 * nk_psi(p, X, Y, Z).real) < 1e-6

        def ip(q, a, b, c):
            return nk_psi(q, a, b, c).imag
        dpsi = (d_fd(lambda q: ip(q, Y, Z, W), p, X) - d_fd(lambda q: ip(q, X, Z, W), p, Y)
                + d_fd(lambda q: ip(q, X, Y, W), p, Z) - d_fd(lambda q: ip(q, X, Y, Z), p, W))
        o = lambda a, b: nk_omega(p, a, b)
        ww = 2 * (o(X, Y) * o(Z, W) - o(X, Z) * o(Y, W) + o(X, W) * o(Y, Z))
        assert abs(dpsi + 2 * ww) < 1e-6


def test_gram_is_symmetric_positive():
    p = rand_c3(RNG)
    G = gram(p, [rand_c3(RNG) for _ in range(3)])
    assert np.allclose(G, G.T) and np.linalg.eigvalsh(G).min() > 0


def test_quaternionic_structure_and_movers():
    h = RNG.normal(size=4) + 1j * RNG.normal(size=4)
    assert np.allclose(quaternionic_j(quaternionic_j(h)), -h)
    for h in ([0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]):
        g, p = move_into_chart(np.array(h, dtype=complex))
        assert np.abs(g.conj().T @ g - np.eye(4)).max() < 1e-14
        assert np.all(np.isfinite(p))
    assert not is_sp2(np.eye(4))  # identity is a group element, not an algebra element
