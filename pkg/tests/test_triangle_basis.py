import numpy as np
import pytest

from orthoderiv.errors import ParameterError, RegionError
from orthoderiv.quad_oracle import finite_diff_richardson, integrate_triangle
from orthoderiv.triangle_basis import (TriangleWeight, biortho_constant, pair_indices,
                                       pairing_matrix, u_poly, v_poly, v_poly_f2)

RNG = np.random.default_rng(4)
POINTS = [(0.2, 0.3), (0.1, 0.7), (0.45, 0.05), (0.33, 0.33)]


def test_weight_validation():
    with pytest.raises(ParameterError):
        TriangleWeight(-1.0, 0.0, 0.0)


def test_u_constant():
    for x, y in POINTS:
        np.testing.assert_allclose(u_poly(0, 0, (0.5, -0.3, 0.2), x, y), 1.0, rtol=1e-15)
        np.testing.assert_allclose(u_poly(0, 0, (0.5, -0.3, 0.2), x, y, method="f2"), 1.0,
                                   rtol=1e-12)


@pytest.mark.parametrize("k,n", [(0, 1), (1, 1), (1, 2), (2, 3), (0, 3)])
def test_u_terminating_matches_f2(k, n):
    w = (0.5, -0.3, 0.2)
    for x, y in POINTS:
        np.testing.assert_allclose(u_poly(k, n, w, x, y), u_poly(k, n, w, x, y, method="f2"),
                                   rtol=1e-10)


@pytest.mark.parametrize("k,n", [(0, 1), (1, 1), (1, 2), (0, 2), (2, 3), (1, 3)])
def test_u_rodrigues(k, n):
    # U_{k,n} w = d^n / dx^k dy^{n-k} [x^{k+a} y^{n-k+b} (1-x-y)^{n+g}], g = 0
    a, b, g = 0.5, 0.3, 0.0
    w = (a, b, g)

    def gen(x, y):
        return x ** (k + a) * y ** (n - k + b) * (1 - x - y) ** (n + g)
    for x, y in [(0.2, 0.3), (0.3, 0.25), (0.15, 0.5), (0.4, 0.4), (0.25, 0.15),
                 (0.1, 0.2), (0.5, 0.2), (0.35, 0.35), (0.22, 0.61), (0.6, 0.1)]:
        weight = x ** a * y ** b * (1 - x - y) ** g
        rod = finite_diff_richardson(gen, x, y, k, n - k, h=4e-3) / weight
        np.testing.assert_allclose(u_poly(k, n, w, x, y), rod, rtol=1e-6, atol=1e-6)


def test_u_degree():
    # U_{1,2} is a polynomial of total degree 2
    x = RNG.uniform(0, 0.5, 30)
    y = RNG.uniform(0, 0.5, 30)
    vals = u_poly(1, 2, (0.5, 0.3, 0.2), x, y)
    A = np.stack([np.ones_like(x), x, y, x * x, x * y, y * y], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    assert np.max(np.abs(A @ coef - vals)) <= 1e-10


def test_u_off_simplex():
    with pytest.raises(RegionError):
        u_poly(1, 2, (0, 0, 0), 0.8, 0.5)


def test_v_examples():
    assert v_poly(0, 0, (0.3, 0.2, 0.1), 0.7, -3.0) == 1.0
    for x, y in POINTS:
        np.testing.assert_allclose(v_poly(1, 0, (0, 0, 0), x, y), x - 1 / 3, atol=1e-15)


def test_v_sum_matches_f2_path():
    w = (0.5, -0.3, 0.2)
    for _ in range(10):
        x, y = RNG.uniform(-0.3, 0.6, 2)
        m, n = RNG.integers(0, 4, 2)
        np.testing.assert_allclose(v_poly(m, n, w, x, y), v_poly_f2(m, n, w, x, y),
                                   rtol=1e-12, atol=1e-12)


def test_v_monic():
    # V_{m,n} - x^m y^n has total degree below m + n: its top coefficients vanish
    w = (0.2, 0.4, -0.3)
    x = RNG.uniform(-1, 1, 40)
    y = RNG.uniform(-1, 1, 40)
    rest = v_poly(2, 1, w, x, y) - x ** 2 * y
    A = np.stack([x ** i * y ** j for i in range(3) for j in range(3 - i)], axis=1)
    coef, *_ = np.linalg.lstsq(A, rest, rcond=None)
    assert np.max(np.abs(A @ coef - rest)) <= 1e-10


def test_biortho_constant_examples():
    np.testing.assert_allclose(biortho_constant(0, 1, (0, 0, 0)), -1 / 12, rtol=1e-15)
    assert biortho_constant(0, 0, (0.3, 0.2, 0.1)) == 1.0
    w = (0, 0, 0)
    val = integrate_triangle(lambda x, y: u_poly(0, 1, w, x, y) * v_poly(0, 1, w, x, y), w)
    np.testing.assert_allclose(val, -1 / 12, rtol=1e-13)
    with pytest.raises(ParameterError):
        biortho_constant(3, 2, w)


@pytest.mark.parametrize("w", [(0.5, 0.3, 0.2), (-0.3, 0.5, 0.0)])
def test_biortho_constant_quadrature(w):
    for n in range(4):
        for k in range(n + 1):
            val = integrate_triangle(lambda x, y: u_poly(k, n, w, x, y)
                                     * v_poly(k, n - k, w, x, y), w)
            np.testing.assert_allclose(val, biortho_constant(k, n, w), rtol=1e-10)


def test_pairing_matrix_pattern():
    g = pairing_matrix(2, 2, (0, 0, 0))
    idx = pair_indices(2)
    for r, (n, k) in enumerate(idx):
        for c, (m, j) in enumerate(idx):
            if (n, k) == (m, j):
                np.testing.assert_allclose(g[r, c], biortho_constant(k, n, (0, 0, 0)), rtol=1e-12)
            else:
                assert abs(g[r, c]) <= 1e-12
    assert g[0, 0] == pytest.approx(1.0, rel=1e-14)


def test_pairing_matrix_limit():
    with pytest.raises(ParameterError):
        pairing_matrix(7, 2, (0, 0, 0))


def test_u_family_not_orthogonal():
    w = (0.5, 0.5, 0.5)
    val = integrate_triangle(lambda x, y: u_poly(0, 1, w, x, y) * u_poly(1, 1, w, x, y), w)
    assert abs(val) > 1e-6


def test_high_degree_warns():
    with pytest.warns(UserWarning):
        u_poly(2, 9, (0, 0, 0), 0.2, 0.3)
