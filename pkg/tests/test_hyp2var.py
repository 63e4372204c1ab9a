import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sp

from orthoderiv import hyp2var as hv
from orthoderiv.errors import ParameterError, RegionError
from orthoderiv.hyp2var import Region

from oracles import f1_sum, f2_sum, f3_sum, f3ext_sum, fp_sum, h2_sum, single_sum


def test_hyp2params_arity():
    for kind, n in hv.ARITY.items():
        hv.Hyp2Params(kind, tuple([0.5] * n), 0.1, 0.1)
        with pytest.raises(ParameterError):
            hv.Hyp2Params(kind, tuple([0.5] * (n + 1)), 0.1, 0.1)
    with pytest.raises(ParameterError):
        hv.Hyp2Params("F9", (1.0,), 0.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_series_region_inside_continuation_region(x, y):
    for kind in hv.ARITY:
        if hv.convergence_region(kind, x, y) is Region.INSIDE_SERIES:
            assert hv._continuation_test(kind, x, y) or kind in ("F1", "FQ", "FPR")


def test_f1():
    assert hv.f1(0.3, 0.4, 0.5, 1.2, 0.0, 0.0).value == 1.0
    np.testing.assert_allclose(hv.f1(0.3, 0.4, 0.0, 1.2, 0.6, 0.5).value,
                               sp.hyp2f1(0.3, 0.4, 1.2, 0.6), rtol=1e-12)
    np.testing.assert_allclose(hv.f1(1, 1, 1, 2, 0.3, 0.1).value,
                               f1_sum(1, 1, 1, 2, 0.3, 0.1), rtol=1e-12)
    with pytest.raises(RegionError):
        hv.f1(1, 1, 1, 2, 1.2, 0.1)


def test_f2():
    np.testing.assert_allclose(hv.f2(0.3, 0.4, 0.5, 1.2, 1.4, 0.6, 0.0).value,
                               sp.hyp2f1(0.3, 0.4, 1.2, 0.6), rtol=1e-12)
    np.testing.assert_allclose(hv.f2(1, 1, 1, 1, 1, 0.2, 0.3).value, 2.0, rtol=1e-12)
    np.testing.assert_allclose(hv.f2(0.6, 0.7, 0.5, 1.3, 1.4, 0.3, 0.25).value,
                               f2_sum(0.6, 0.7, 0.5, 1.3, 1.4, 0.3, 0.25), rtol=1e-12)
    with pytest.raises(RegionError):
        hv.f2(1, 1, 1, 1, 1, 0.6, 0.5)


@pytest.mark.parametrize("x,y", [(0.2, 0.3), (-0.8, 0.5), (0.45, 0.5), (-2.0, -3.0)])
def test_f2_swap_symmetry(x, y):
    a = hv.f2(0.6, 0.7, 0.5, 1.3, 1.4, x, y).value
    b = hv.f2(0.6, 0.5, 0.7, 1.4, 1.3, y, x).value
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_f2_continuation_matches_geometric_closed_form():
    # F2(1; 1, 1; 1, 1; x, y) = 1 / (1 - x - y) holds on the whole continuation region
    for x, y in [(-0.9, 0.6), (0.7, -0.5), (-3.0, -2.0)]:
        np.testing.assert_allclose(hv.f2(1, 1, 1, 1, 1, x, y).value, 1 / (1 - x - y), rtol=1e-9)


def test_f3():
    assert hv.f3(0.3, 0.4, 0.5, 0.6, 1.2, 0.0, 0.0).value == 1.0
    np.testing.assert_allclose(hv.f3(0.3, 0.4, 0.0, 0.6, 1.2, 0.7, 0.5).value,
                               sp.hyp2f1(0.4, 0.6, 1.2, 0.5), rtol=1e-12)
    np.testing.assert_allclose(hv.f3(0.3, 0.4, 0.5, 0.6, 1.2, 0.4, -0.3).value,
                               f3_sum(0.3, 0.4, 0.5, 0.6, 1.2, 0.4, -0.3), rtol=1e-12)


@pytest.mark.parametrize("x,y", [(0.3, 0.4), (-2.0, 0.5), (-5.0, -3.0), (0.9, -0.95)])
def test_f3_swap_symmetry(x, y):
    a = hv.f3(0.3, 0.4, 0.5, 0.6, 1.7, x, y).value
    b = hv.f3(0.4, 0.3, 0.6, 0.5, 1.7, y, x).value
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_f3_continuation_paths_agree():
    # outside |x|,|y| < 1 the row sums and the integral path must coincide
    a1, a2, b1, b2, c = 0.3, 0.4, 0.5, 0.6, 1.7
    for x, y in [(-2.0, 0.5), (-4.0, -0.6)]:
        rows = hv.f3(a1, a2, b1, b2, c, x, y, method="rows").value
        integral = hv.f3(a1, a2, b1, b2, c, x, y, method="integral", n_nodes=64).value
        np.testing.assert_allclose(rows, integral, rtol=1e-9)


def test_f3_extended():
    args = (0.3, 0.4, 0.5, 0.6, 1.7)
    np.testing.assert_allclose(hv.f3_extended(*args, 0.8, 0.8, 0.4, 0.3).value,
                               hv.f3(*args, 0.4, 0.3).value, rtol=1e-13)
    assert hv.f3_extended(*args, 0.2, 0.9, 0.0, 0.0).value == 1.0
    np.testing.assert_allclose(hv.f3_extended(*args, 0.2, 0.9, 0.4, -0.3).value,
                               f3ext_sum(*args, 0.2, 0.9, 0.4, -0.3), rtol=1e-12)


def test_h2():
    a, b1, b2, c1, c2 = 0.35, 0.4, 0.3, 0.45, 1.3
    np.testing.assert_allclose(hv.h2(a, b1, b2, c1, c2, 0.5, 0.0).value,
                               sp.hyp2f1(a, b1, c2, 0.5), rtol=1e-12)
    np.testing.assert_allclose(hv.h2(a, b1, b2, c1, c2, 0.0, 0.6).value,
                               sp.hyp2f1(b2, c1, 1 - a, -0.6), rtol=1e-12)
    np.testing.assert_allclose(hv.h2(a, b1, b2, c1, c2, 0.3, 0.4).value,
                               h2_sum(a, b1, b2, c1, c2, 0.3, 0.4), rtol=1e-11)


def test_h2_rows_match_series_inside():
    a, b1, b2, c1, c2 = 0.35, 0.4, 0.3, 0.45, 1.3
    s = hv.h2(a, b1, b2, c1, c2, 0.4, 0.5, method="series").value
    r = hv.h2(a, b1, b2, c1, c2, 0.4, 0.5, method="rows").value
    np.testing.assert_allclose(s, r, rtol=1e-11)


def test_h2_region_error():
    with pytest.raises(RegionError):
        hv.h2(0.35, 0.4, 0.3, 0.45, 1.3, 1.5, 0.2)
    with pytest.raises(RegionError):
        hv.h2(0.35, 0.4, 0.3, 0.45, 1.3, 0.5, -1.5)


def test_fp():
    a, b1, b2, c1, c2 = 0.6, 0.3, 0.7, 1.4, 1.3
    assert hv.fp(a, b1, b2, c1, c2, 0.0, 1.0).value == 1.0
    x = 0.45
    single = single_sum([a, a - c2 + 1, b1], [a + b2 - c2 + 1, c1], x)
    np.testing.assert_allclose(hv.fp(a, b1, b2, c1, c2, x, 1.0).value, single, rtol=1e-12)
    np.testing.assert_allclose(hv.fp(a, b1, b2, c1, c2, 0.3, 0.8).value,
                               fp_sum(a, b1, b2, c1, c2, 0.3, 0.8), rtol=1e-12)
    with pytest.raises(RegionError):
        hv.fp(a, b1, b2, c1, c2, 0.3, -0.2)


def test_fq_collapses_at_y_one():
    a, b1, b2, c1, c2 = 0.35, 0.3, 0.4, 0.45, 1.2
    x = 2.5
    single = x ** (-b1) * single_sum([b1 + c2 - b2 - a, b1, b1 - c1 + 1],
                                     [b1 - a + 1, b1 + c2 - a], 1 / x)
    np.testing.assert_allclose(hv.fq(a, b1, b2, c1, c2, x, 1.0).value, single, rtol=1e-12)


def test_fq_region_error():
    with pytest.raises(RegionError):
        hv.fq(0.35, 0.3, 0.4, 0.45, 1.2, 0.5, 1.0)


def test_fpr_finite_at_one_one():
    sv = hv.fpr(0.6, 0.3, 0.7, 1.4, 1.6, 1.0, 1.0)
    assert math.isfinite(sv.value)


@pytest.mark.parametrize("x,y", [(0.9, 0.95), (0.85, 1.1), (0.95, 0.9)])
def test_fp_decomposition(x, y):
    params = (0.6, 0.3, 0.7, 1.4, 1.6)
    reg, sing = hv.fp_decomposition(*params, x, y, tol=1e-13)
    direct = hv.fp(*params, x, y, tol=1e-13, method="rows").value
    np.testing.assert_allclose(reg.value + sing.value, direct, rtol=1e-8)


@pytest.mark.parametrize("x1,x2", [(0.2, 0.8), (0.3, 0.9), (0.1, 0.5)])
def test_f3_continuation_identity(x1, x2):
    left, right = hv.f3_continuation(0.3, 0.4, 0.6, 0.5, 1.7, x1, x2, tol=1e-13)
    np.testing.assert_allclose(left, right, rtol=1e-8)


def test_f3_continuation_degenerate_b2_zero():
    # with b2 = 0 the F_Q term and the inner F3 both reduce to Gauss functions
    left, right = hv.f3_continuation(0.3, 0.4, 0.0, 0.5, 1.7, 0.2, 0.8, tol=1e-13)
    np.testing.assert_allclose(left, sp.hyp2f1(0.4, 0.5, 1.7, 0.8), rtol=1e-12)
    np.testing.assert_allclose(left, right, rtol=1e-9)


def test_f3_continuation_random_parameters():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a0, b1, b2, c1 = rng.uniform(0.2, 0.7, 4)
        c2 = b1 + c1 + rng.uniform(0.3, 0.9)
        x2 = rng.uniform(0.4, 0.9)
        x1 = rng.uniform(0.05, 0.8 * x2 / (2 - x2))
        left, right = hv.f3_continuation(a0, b1, b2, c1, c2, x1, x2, tol=1e-13)
        np.testing.assert_allclose(left, right, rtol=1e-8)


def test_pde_residual_of_f2_solution():
    a, b, c, d, e = 0.6, 0.7, 0.35, 0.4, 0.3
    sys = (e - a - b - c - d + 2, 1 - c, 1 - d, 2 - a - c, 2 - b - d)

    def sol(s, t):
        return s ** (a + c - 1) * t ** (b + d - 1) * hv.f2(e, a, b, a + c, b + d, s, t).value
    r1, r2 = hv.f2_pde_residual(*sys, sol, 0.3, 0.4)
    assert abs(r1) <= 1e-4 and abs(r2) <= 1e-4


def test_pde_residual_of_f3_solution():
    a, b, c, d, e = 0.6, 0.7, 0.35, 0.4, 0.3
    sys = (e - a - b - c - d + 2, 1 - c, 1 - d, 2 - a - c, 2 - b - d)

    def sol(s, t):
        return s ** (c - 1) * t ** (d - 1) * hv.f3(a, b, 1 - c, 1 - d, a + b + 1 - e,
                                                  1 / s, 1 / t).value
    r1, r2 = hv.f2_pde_residual(*sys, sol, 2.0, 3.0)
    assert abs(r1) <= 1e-4 and abs(r2) <= 1e-4


def test_pde_residual_of_non_solution():
    r1, r2 = hv.f2_pde_residual(0.3, 0.4, 0.5, 1.2, 1.3, lambda s, t: s * s * t, 0.7, 0.6)
    assert max(abs(r1), abs(r2)) > 0.1


def test_pde_residual_stencil_domain():
    with pytest.raises(RegionError):
        hv.f2_pde_residual(0.3, 0.4, 0.5, 1.2, 1.3, lambda s, t: s * t, 0.0005, 0.5,
                           domain=lambda s, t: s > 0)


def test_evaluate_dispatch():
    spec = hv.Hyp2Params("F2", (1, 1, 1, 1, 1), 0.2, 0.3)
    np.testing.assert_allclose(hv.evaluate(spec).value, 2.0, rtol=1e-12)


def test_array_variants_match_scalar():
    x = np.array([0.1, -0.7, 0.4])
    y = np.array([0.2, 0.5, -1.3])
    got = hv.f2_array(0.6, 0.7, 0.5, 1.3, 1.4, x, y)
    ref = [hv.f2(0.6, 0.7, 0.5, 1.3, 1.4, a, b).value for a, b in zip(x, y)]
    np.testing.assert_allclose(got, ref, rtol=1e-10)
    got = hv.f3_array(0.3, 0.4, 0.5, 0.6, 1.7, x, y)
    ref = [hv.f3(0.3, 0.4, 0.5, 0.6, 1.7, a, b).value for a, b in zip(x, y)]
    np.testing.assert_allclose(got, ref, rtol=1e-10)
