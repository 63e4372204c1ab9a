"""Gauss-Jacobi quadrature and finite differences used as independent oracles.

Nothing here calls the closed-form kernels or the two-variable series, so the
values can be used to check them.
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConvergenceError, ParameterError, RegionError
from .scalar_special import beta2, beta3

DEFAULT_NODES = 96


@dataclass(frozen=True)
class JacobiRule:
    """Nodes and weights for the weight (1-x)^alpha (1+x)^beta on (-1, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    beta: float

    def mapped(self, lo, hi):
        """Rule for (hi-x)^alpha (x-lo)^beta on (lo, hi)."""
        half = 0.5 * (hi - lo)
        x = lo + half * (self.nodes + 1.0)
        w = self.weights * half ** (self.alpha + self.beta + 1.0)
        return x, w


@functools.lru_cache(maxsize=512)
def _rule_cached(n, alpha, beta):
    x, w = roots_jacobi(n, alpha, beta)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return JacobiRule(x, w, alpha, beta)


def gauss_jacobi_rule(n_nodes, alpha=0.0, beta=0.0):
    """Gauss-Jacobi rule with n_nodes points; cached per (n, alpha, beta)."""
    n = int(n_nodes)
    if n < 1:
        raise ParameterError("n_nodes must be at least 1")
    if not (alpha > -1 and beta > -1):
        raise ParameterError(f"Jacobi exponents must exceed -1, got {alpha}, {beta}")
    return _rule_cached(n, float(alpha), float(beta))


def unit_rule(n_nodes, left=0.0, right=0.0):
    """Nodes and weights on (0,1) for the weight x^left (1-x)^right."""
    return gauss_jacobi_rule(n_nodes, right, left).mapped(0.0, 1.0)


def _check_exponent(e):
    if e <= -2 or (e <= -1 and float(e).is_integer()):
        raise ParameterError(f"singular exponent {e}: the integral diverges")


def leg_rule(n_nodes, lo, hi, left=0.0, right=0.0):
    """Nodes and weights with sum(w * g(x)) ~ int_lo^hi (x-lo)^left (hi-x)^right g(x) dx.

    Exponents in (-2,-1) are taken as Hadamard finite parts. For those the
    rule gains an extra node at the singular endpoint, carrying the weight
    that subtracts g there, so the result stays a plain weighted sum.
    """
    _check_exponent(left)
    _check_exponent(right)
    fin_l, fin_r = left < -1, right < -1
    if fin_l and fin_r:
        mid = 0.5 * (lo + hi)
        xl, wl = leg_rule(n_nodes, lo, mid, left, 0.0)
        xr, wr = leg_rule(n_nodes, mid, hi, 0.0, right)
        wl = wl * (hi - xl) ** right
        wr = wr * (xr - lo) ** left
        return np.concatenate((xl, xr)), np.concatenate((wl, wr))
    if not (fin_l or fin_r):
        return gauss_jacobi_rule(n_nodes, right, left).mapped(lo, hi)
    length = hi - lo
    total = length ** (left + right + 1.0) * beta2(left + 1.0, right + 1.0)
    if fin_l:
        x, W = gauss_jacobi_rule(n_nodes, right, left + 1.0).mapped(lo, hi)
        w = W / (x - lo)
        return np.append(x, lo), np.append(w, total - w.sum())
    x, W = gauss_jacobi_rule(n_nodes, right + 1.0, left).mapped(lo, hi)
    w = W / (hi - x)
    return np.append(x, hi), np.append(w, total - w.sum())


def _sub_leg(n_nodes, lo, hi, length, e0, e1):
    """Rule on (lo,hi) inside (0,length) for the weight x^e0 (length-x)^e1."""
    left = e0 if lo == 0.0 else 0.0
    right = e1 if hi == length else 0.0
    x, w = leg_rule(n_nodes, lo, hi, left, right)
    if lo != 0.0:
        w = w * x ** e0
    if hi != length:
        w = w * (length - x) ** e1
    return x, w


def rectangle_integral(g, P, Q, ep=(0.0, 0.0), eq=(0.0, 0.0), corner=None,
                       n_nodes=DEFAULT_NODES):
    """int_0^P int_0^Q p^ep0 (P-p)^ep1 q^eq0 (Q-q)^eq1 [H^gc] g(p, q) dq dp.

    corner: optional (gc, h_p, h_q, h_pq) with H = h_p p + h_q q + h_pq p q,
    a factor vanishing only at the origin. The corner box [0,P/2]x[0,Q/2] is
    then split along its diagonal and each half is mapped to the unit square
    so that H factors out as a power of the radial variable.
    g must accept broadcast arrays and be smooth on the closed rectangle.
    """
    if corner is None:
        p, wp = leg_rule(n_nodes, 0.0, P, *ep)
        q, wq = leg_rule(n_nodes, 0.0, Q, *eq)
        return _grid_sum(g(p[:, None], q[None, :]), wp, wq)
    gc, hp, hq, hpq = corner

    def H(p, q):
        return hp * p + hq * q + hpq * p * q

    P1, Q1 = 0.5 * P, 0.5 * Q
    total = 0.0
    for (plo, phi), (qlo, qhi) in (((P1, P), (0.0, Q1)), ((0.0, P1), (Q1, Q)),
                                   ((P1, P), (Q1, Q))):
        p, wp = _sub_leg(n_nodes, plo, phi, P, *ep)
        q, wq = _sub_leg(n_nodes, qlo, qhi, Q, *eq)
        pp, qq = p[:, None], q[None, :]
        total += _grid_sum(H(pp, qq) ** gc * g(pp, qq), wp, wq)

    def smooth(pp, qq):
        return (P - pp) ** ep[1] * (Q - qq) ** eq[1] * g(pp, qq)

    radial = ep[0] + eq[0] + gc + 1.0
    scale = P1 ** (ep[0] + 1.0) * Q1 ** (eq[0] + 1.0)
    xi, wxi = leg_rule(n_nodes, 0.0, 1.0, radial, 0.0)
    X = xi[:, None]
    # below the diagonal: p = P1 xi, q = Q1 xi eta
    eta, weta = leg_rule(n_nodes, 0.0, 1.0, eq[0], 0.0)
    E = eta[None, :]
    h = hp * P1 + hq * Q1 * E + hpq * P1 * Q1 * X * E
    total += scale * _grid_sum(h ** gc * smooth(P1 * X, Q1 * X * E), wxi, weta)
    # above the diagonal: q = Q1 xi, p = P1 xi eta
    eta, weta = leg_rule(n_nodes, 0.0, 1.0, ep[0], 0.0)
    E = eta[None, :]
    h = hp * P1 * E + hq * Q1 + hpq * P1 * Q1 * X * E
    total += scale * _grid_sum(h ** gc * smooth(P1 * X * E, Q1 * X), wxi, weta)
    return total


def _grid_sum(vals, wp, wq):
    vals = np.broadcast_to(vals, (wp.size, wq.size))
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("non-finite quadrature sample")
    return float(wp @ vals @ wq)


def product_unit_integral(f, exponents, n_nodes=DEFAULT_NODES):
    """Integral over (0,1)^d of f(*x) prod x_k^{p_k} (1-x_k)^{q_k}.

    exponents: list of (p_k, q_k) pairs, one per dimension. f must accept
    broadcast arrays.
    """
    grids, weights = [], []
    d = len(exponents)
    for k, (p, q) in enumerate(exponents):
        x, w = unit_rule(n_nodes, p, q)
        shape = [1] * d
        shape[k] = -1
        grids.append(x.reshape(shape))
        weights.append(w.reshape(shape))
    vals = f(*grids)
    total = vals
    for w in weights:
        total = total * w
    out = float(np.sum(total))
    if not math.isfinite(out):
        raise ConvergenceError("non-finite quadrature sample")
    return out


# ------------------------------------------------------------- triangle


@dataclass(frozen=True)
class TriangleRule:
    """Product rule on the simplex via u = xi, v = (1 - xi) eta.

    Weights include x^alpha y^beta (1-x-y)^gamma and are normalized so that
    they sum to one.
    """

    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    alpha: float
    beta: float
    gamma: float


@functools.lru_cache(maxsize=128)
def _triangle_cached(n, alpha, beta, gamma):
    # x^a y^b (1-x-y)^g dx dy with x = xi, y = (1-xi) eta
    # = xi^a (1-xi)^(b+g+1) eta^b (1-eta)^g dxi deta
    xi, wxi = unit_rule(n, alpha, beta + gamma + 1.0)
    eta, weta = unit_rule(n, beta, gamma)
    X = np.repeat(xi, n)
    Y = (1.0 - X) * np.tile(eta, n)
    W = np.outer(wxi, weta).ravel() / beta3(alpha + 1.0, beta + 1.0, gamma + 1.0)
    for arr in (X, Y, W):
        arr.setflags(write=False)
    return TriangleRule(X, Y, W, alpha, beta, gamma)


def triangle_rule(n_nodes, alpha, beta, gamma):
    if min(alpha, beta, gamma) <= -1:
        raise ParameterError("triangle weight exponents must exceed -1")
    return _triangle_cached(int(n_nodes), float(alpha), float(beta), float(gamma))


def integrate_triangle(f, weight, n_nodes=48):
    """Normalized integral of f against x^alpha y^beta (1-x-y)^gamma on the simplex.

    weight: (alpha, beta, gamma). f takes arrays (x, y).
    """
    alpha, beta, gamma = weight
    rule = triangle_rule(n_nodes, alpha, beta, gamma)
    vals = np.asarray(f(rule.x, rule.y), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("non-finite sample in triangle quadrature")
    return float(np.sum(vals * rule.weights))


# ------------------------------------------------------- kernel integrals
#
# The region kernels are double integrals of
#     u^(a-1) (s-u)^(c-1) (1-u-v)^(-e) v^(b-1) (t-v)^(d-1)
# over subsets of the triangle u, v > 0, u + v < 1. Each one is rewritten
# below as an integral over a rectangle, with every algebraic singularity
# sitting on an edge (or, for the region-V pieces, on one corner).

_REGION_TESTS = {
    "I": lambda s, t: 0 < s < 1 and 0 < t < 1 - s,
    "II": lambda s, t: s > 1 and t > 1,
    "III": lambda s, t: 0 < s < 1 < t,
    "IV": lambda s, t: 0 < t < 1 < s,
    "V": lambda s, t: 0 < s < 1 and 1 - s < t < 1,
}


def _abcde(p):
    if hasattr(p, "a"):
        return p.a, p.b, p.c, p.d, p.e
    return tuple(p)


def _kernel_i1(a, b, c, d, e, s, t, n):
    return rectangle_integral(lambda u, v: (1.0 - u - v) ** (-e), s, t,
                              (a - 1.0, c - 1.0), (b - 1.0, d - 1.0), n_nodes=n)


def _kernel_i2(a, b, c, d, e, s, t, n):
    # u = (1-v) x
    def g(v, x):
        return (s - (1.0 - v) * x) ** (c - 1.0) * (t - v) ** (d - 1.0)
    return rectangle_integral(g, 1.0, 1.0, (b - 1.0, a - e), (a - 1.0, -e), n_nodes=n)


def _kernel_i3(a, b, c, d, e, s, t, n):
    # v = (1-u) y
    def g(u, y):
        return (1.0 - u) ** (b - e) * (t - (1.0 - u) * y) ** (d - 1.0)
    return rectangle_integral(g, s, 1.0, (a - 1.0, c - 1.0), (b - 1.0, -e), n_nodes=n)


def _kernel_i4(a, b, c, d, e, s, t, n):
    # u = (1-v) x
    def g(v, x):
        return (1.0 - v) ** (a - e) * (s - (1.0 - v) * x) ** (c - 1.0)
    return rectangle_integral(g, t, 1.0, (b - 1.0, d - 1.0), (a - 1.0, -e), n_nodes=n)


def _kernel_i5(a, b, c, d, e, s, t, n):
    # p = s - u, q = 1 - s - v; then 1 - u - v = p + q
    def g(p, q):
        return (t - 1.0 + s + q) ** (d - 1.0)
    return rectangle_integral(g, s, 1.0 - s, (c - 1.0, a - 1.0), (0.0, b - 1.0),
                              corner=(-e, 1.0, 1.0, 0.0), n_nodes=n)


def _kernel_i6(a, b, c, d, e, s, t, n):
    # u = (1-v)(1-p), v = 1 - s + q; then s - u = s p + q - p q
    def g(p, q):
        return (s - q) ** (a - e) * (1.0 - s + q) ** (b - 1.0)
    return rectangle_integral(g, 1.0, t - 1.0 + s, (-e, a - 1.0), (0.0, d - 1.0),
                              corner=(c - 1.0, s, 1.0, -1.0), n_nodes=n)


_KERNELS = {"I": _kernel_i1, "II": _kernel_i2, "III": _kernel_i3, "IV": _kernel_i4}


def integrate_kernel_region(region, p, s, t, n_nodes=DEFAULT_NODES, part=None):
    """Brute-force value of the region kernel at (s, t).

    region: "I".."V" (or a tag whose value is one of these); p: object with
    attributes a..e, or a 5-tuple. For region V the sum of the two pieces is
    returned; part="I5" or "I6" selects one piece.
    Powers between -2 and -1 at an endpoint are read as Hadamard finite
    parts, which continue the integral analytically in the exponent.
    """
    tag = getattr(region, "value", region)
    if tag not in _REGION_TESTS:
        raise RegionError(f"no defining integral for region {tag!r}")
    s, t = float(s), float(t)
    if not _REGION_TESTS[tag](s, t):
        raise RegionError(f"(s, t) = ({s}, {t}) is not inside region {tag}")
    a, b, c, d, e = (float(v) for v in _abcde(p))
    if not (a > 0 and b > 0 and e < 1):
        raise ParameterError("kernel integrals need a > 0, b > 0, e < 1")
    if tag != "V":
        if part is not None:
            raise ParameterError("part applies to region V only")
        return _KERNELS[tag](a, b, c, d, e, s, t, n_nodes)
    i5 = _kernel_i5(a, b, c, d, e, s, t, n_nodes) if part in (None, "I5") else 0.0
    i6 = _kernel_i6(a, b, c, d, e, s, t, n_nodes) if part in (None, "I6") else 0.0
    if part not in (None, "I5", "I6"):
        raise ParameterError(f"unknown part {part!r}")
    return i5 + i6


# ------------------------------------------------------ finite differences

# central first- and second-derivative weights, O(h^2)
_STENCILS = {
    0: ([0], [1.0]),
    1: ([-1, 1], [-0.5, 0.5]),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
}


def finite_diff_partial(f, x, y, m, l, h=1e-3, domain=None):
    """Central-difference estimate of d^(m+l) f / dx^m dy^l at (x, y).

    domain: optional predicate domain(x, y) -> bool checked on every stencil
    point; a failure raises RegionError.
    """
    if m < 0 or l < 0 or m + l > 4:
        raise ParameterError("finite_diff_partial supports m + l <= 4")
    ox, wx = _STENCILS[m]
    oy, wy = _STENCILS[l]
    total = 0.0
    for (i, a), (j, b) in itertools.product(zip(ox, wx), zip(oy, wy)):
        px, py = x + i * h, y + j * h
        if domain is not None and not domain(px, py):
            raise RegionError(f"stencil point ({px}, {py}) is outside the domain")
        total += a * b * float(f(px, py))
    return total / h ** (m + l)


def finite_diff_richardson(f, x, y, m, l, h=2e-3, domain=None):
    """finite_diff_partial at h and h/2 combined to cancel the h^2 term."""
    coarse = finite_diff_partial(f, x, y, m, l, h, domain)
    fine = finite_diff_partial(f, x, y, m, l, 0.5 * h, domain)
    return (4.0 * fine - coarse) / 3.0
