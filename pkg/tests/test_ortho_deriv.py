import math

import numpy as np
import pytest

from orthoderiv.errors import ParameterError, RegionError
from orthoderiv.ortho_deriv import (SquareJacobiSpec, TriangleDerivSpec, convergence_study,
                                    d_delta_square, d_delta_triangle, jacobi_norm_ratio, jacobi_p)
from orthoderiv.triangle_basis import TriangleWeight
from orthoderiv.verify import check_exactness
from scipy.special import eval_jacobi


def test_jacobi_p_matches_scipy():
    x = np.linspace(-1, 1, 11)
    for n in range(6):
        np.testing.assert_allclose(jacobi_p(n, 0.3, -0.4, x), eval_jacobi(n, 0.3, -0.4, x),
                                   rtol=1e-12, atol=1e-13)


def test_norm_ratio_examples():
    np.testing.assert_allclose(jacobi_norm_ratio(0, 0, 0), 2.0, rtol=1e-15)
    np.testing.assert_allclose(jacobi_norm_ratio(1, 0, 0), 2 / 3, rtol=1e-14)
    for order in range(6):
        for a, b in [(0, 0), (0.5, -0.3), (-0.5, -0.5), (2.0, 1.0)]:
            assert jacobi_norm_ratio(order, a, b) > 0
    with pytest.raises(ParameterError):
        jacobi_norm_ratio(13, 0, 0)


def test_spec_validation():
    with pytest.raises(ParameterError):
        SquareJacobiSpec(-1.0, 0, 0, 0, 1, 1)
    with pytest.raises(ParameterError):
        TriangleDerivSpec(TriangleWeight(0, 0, 0), 3, 2, 0.1)
    with pytest.raises(ParameterError):
        TriangleDerivSpec(TriangleWeight(0, 0, 0), 1, 2, 0.0)


@pytest.mark.parametrize("delta", [0.5, 0.1, 0.01])
def test_square_mixed_of_xy(delta):
    spec = SquareJacobiSpec(0.3, 0.2, -0.4, 0.1, 1, 1)
    np.testing.assert_allclose(d_delta_square(lambda x, y: x * y, 0.3, -0.2, spec, delta), 1.0,
                               rtol=1e-12)


def test_square_constant():
    spec = SquareJacobiSpec(0, 0, 0, 0, 1, 0)
    assert abs(d_delta_square(lambda x, y: 3.5 + 0 * x, 0.1, 0.2, spec, 0.1)) <= 1e-14


def test_square_exp_converges():
    spec = SquareJacobiSpec(0, 0, 0, 0, 2, 1)
    f = lambda x, y: np.exp(x + y)  # noqa: E731
    rows = convergence_study(lambda d: d_delta_square(f, 0.0, 0.0, spec, d), 1.0,
                             [0.2, 0.1, 0.05, 0.025])
    errs = [r[2] for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("delta", [0.5, 0.1, 0.01])
def test_triangle_first_derivative_of_x(delta):
    spec = TriangleDerivSpec(TriangleWeight(0.2, 0.5, -0.3), 1, 1, delta)
    np.testing.assert_allclose(d_delta_triangle(lambda x, y: x, 0.3, 0.1, spec), 1.0, rtol=1e-12)


def test_triangle_constant():
    spec = TriangleDerivSpec(TriangleWeight(0.2, 0.2, 0.2), 1, 2, 0.1)
    assert abs(d_delta_triangle(lambda x, y: 2.0 + 0 * x, 0.3, 0.1, spec)) <= 1e-13


def test_triangle_sin_first_order():
    exact = -4 * math.sin(0.5)
    f = lambda x, y: np.sin(x + 2 * y)  # noqa: E731
    errs = [abs(d_delta_triangle(f, 0.1, 0.2, TriangleDerivSpec(TriangleWeight(0, 0, 0), 0, 2, d))
                - exact) for d in (0.1, 0.05, 0.025)]
    # first order or better: halving delta at least roughly halves the error
    assert errs[1] / errs[0] < 0.6 and errs[2] / errs[1] < 0.6


def test_domain_error_from_non_finite_samples():
    spec = SquareJacobiSpec(0, 0, 0, 0, 1, 0)
    with pytest.raises(RegionError):
        d_delta_square(lambda x, y: np.log(x) + y, 0.05, 0.0, spec, 0.1)


def test_exactness_order_three_coarse_delta():
    checks = check_exactness(max_order=3, deltas=(0.5,))
    assert all(c.passed for c in checks), [(c.name, c.measured) for c in checks]


@pytest.mark.parametrize("delta,bound", [(0.1, 1e-9), (0.01, 1e-7)])
def test_exactness_order_three_rounding_floor(delta, bound):
    # third-order operators amplify rounding in the samples roughly like delta^-2,
    # so the error on cubics sits near 1e-10 at delta = 0.1 and 1e-8 at 0.01
    worst = max(c.measured for c in check_exactness(max_order=3, deltas=(delta,)))
    assert worst < bound
