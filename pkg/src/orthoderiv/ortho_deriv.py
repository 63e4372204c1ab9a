"""Orthogonal derivatives at finite delta on the square and the triangle.

On the square the derivative of order (m, l) is

    m! l! (k'_m / h'_m) (k''_l / h''_l) delta^{-m-l}
        * int int f(x + delta u, y + delta v) P_m^{(alpha,beta)}(u) P_l^{(gamma,delta_w)}(v)
          (1-u)^alpha (1+u)^beta (1-v)^gamma (1+v)^delta_w du dv

over [-1,1]^2, where h/k is the squared norm over the leading coefficient.
On the triangle the derivative of order (k, n-k) uses the U polynomials:

    (-1)^n / B(alpha+1+k, beta+1+n-k, gamma+1+n) delta^{-n}
        * int int_T f(x + delta u, y + delta v) U_{k,n}(u, v) u^alpha v^beta (1-u-v)^gamma du dv.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError, RegionError
from .quad_oracle import gauss_jacobi_rule, triangle_rule
from .scalar_special import beta3
from .triangle_basis import TriangleWeight, u_poly


@dataclass(frozen=True)
class SquareJacobiSpec:
    """Jacobi exponents (alpha, beta) on the x-axis, (gamma, delta_exp) on the
    y-axis, and derivative orders m (x) and l (y)."""

    alpha: float
    beta: float
    gamma: float
    delta_exp: float
    m: int
    l: int

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma, self.delta_exp) <= -1:
            raise ParameterError("Jacobi exponents must exceed -1")
        if self.m < 0 or self.l < 0:
            raise ParameterError("derivative orders must be non-negative")


@dataclass(frozen=True)
class TriangleDerivSpec:
    weight: TriangleWeight
    k: int
    n: int
    delta: float

    def __post_init__(self):
        if not (0 <= self.k <= self.n):
            raise ParameterError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if not self.delta > 0:
            raise ParameterError("delta must be positive")


def jacobi_p(n, alpha, beta, x):
    """Jacobi polynomial P_n^{(alpha,beta)}(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    ab = alpha + beta
    p = 0.5 * (alpha - beta + (ab + 2.0) * x)
    for k in range(1, n):
        c = 2.0 * k + ab
        a1 = 2.0 * (k + 1) * (k + ab + 1) * c
        a2 = (c + 1) * (alpha * alpha - beta * beta)
        a3 = c * (c + 1) * (c + 2)
        a4 = 2.0 * (k + alpha) * (k + beta) * (c + 2)
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
    return p


def jacobi_norm_ratio(order, alpha, beta, n_nodes=None):
    """h/k for P_order^{(alpha,beta)}: int P_order(u) u^order (1-u)^alpha (1+u)^beta du."""
    if order < 0 or order > 12:
        raise ParameterError("jacobi_norm_ratio supports orders 0..12")
    if n_nodes is None:
        n_nodes = order + 2
    rule = gauss_jacobi_rule(n_nodes, alpha, beta)
    val = float(np.sum(rule.weights * jacobi_p(order, alpha, beta, rule.nodes) * rule.nodes ** order))
    if not val > 0:
        raise ConvergenceError("norm ratio quadrature failed")
    return val


def _sample(f, X, Y):
    try:
        vals = np.asarray(f(X, Y), dtype=float)
    except (ValueError, ArithmeticError) as exc:
        raise RegionError(f"function cannot be evaluated on the stencil: {exc}") from exc
    vals = np.broadcast_to(vals, X.shape)
    if not np.all(np.isfinite(vals)):
        raise RegionError("function is not finite on the sampling neighborhood")
    return vals


def d_delta_square(f, x, y, spec, delta, n_nodes=None):
    """Finite-delta orthogonal derivative of order (m, l) on [-1,1]^2.

    f takes broadcast arrays (x, y). Exact for polynomials of total degree
    at most m + l.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive")
    m, l = spec.m, spec.l
    if n_nodes is None:
        n_nodes = 2 * max(m, l) + 16
    ru = gauss_jacobi_rule(n_nodes, spec.alpha, spec.beta)
    rv = gauss_jacobi_rule(n_nodes, spec.gamma, spec.delta_exp)
    U = ru.nodes[:, None]
    V = rv.nodes[None, :]
    vals = _sample(f, x + delta * U + 0 * V, y + delta * V + 0 * U)
    if m + l > 0:
        # constants are annihilated; removing f(x, y) first limits cancellation
        vals = vals - _sample(f, np.array(x, dtype=float), np.array(y, dtype=float))
    pu = ru.weights * jacobi_p(m, spec.alpha, spec.beta, ru.nodes)
    pv = rv.weights * jacobi_p(l, spec.gamma, spec.delta_exp, rv.nodes)
    integral = float(pu @ vals @ pv)
    scale = (math.factorial(m) / jacobi_norm_ratio(m, spec.alpha, spec.beta)
             * math.factorial(l) / jacobi_norm_ratio(l, spec.gamma, spec.delta_exp))
    return scale * integral / delta ** (m + l)


def d_delta_triangle(f, x, y, spec, n_nodes=None):
    """Finite-delta orthogonal derivative d^n f / dx^k dy^{n-k} on the triangle.

    The sampling neighborhood is (x, y) + delta * T. Exact for polynomials of
    total degree at most n.
    """
    w = spec.weight
    k, n, delta = spec.k, spec.n, spec.delta
    if n_nodes is None:
        n_nodes = 2 * n + 16
    rule = triangle_rule(n_nodes, w.alpha, w.beta, w.gamma)
    vals = _sample(f, x + delta * rule.x, y + delta * rule.y)
    if n > 0:
        vals = vals - _sample(f, np.array(x, dtype=float), np.array(y, dtype=float))
    basis = u_poly(k, n, w, rule.x, rule.y)
    # rule weights are normalized by B(alpha+1, beta+1, gamma+1)
    integral = float(np.sum(rule.weights * vals * basis)) * beta3(w.alpha + 1, w.beta + 1, w.gamma + 1)
    coef = (-1) ** n / beta3(w.alpha + 1 + k, w.beta + 1 + n - k, w.gamma + 1 + n)
    return coef * integral / delta ** n


def convergence_study(operator, exact, deltas):
    """[(delta, value, error)] for operator(delta) against an exact value."""
    out = []
    for d in deltas:
        v = operator(d)
        out.append((d, v, abs(v - exact)))
    return out
