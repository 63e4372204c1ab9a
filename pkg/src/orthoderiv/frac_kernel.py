"""Fractional orthogonal derivatives in two variables.

On the square the operator is built from one-dimensional Jacobi kernels
J1 (on [-1,1]) and J2 (on (1,inf)). On the triangle it is

    W f(x, y) = delta^(-mu-nu) / (B(a, b, 1-e) Gamma(-mu) Gamma(-nu))
                * int int f(x + delta s, y + delta t) I(s, t) ds dt

over the first quadrant, where the kernel I is the double integral of

    u^(a-1) (s-u)^(c-1) (1-u-v)^(-e) v^(b-1) (t-v)^(d-1)

over the part of the unit triangle below and to the left of (s, t), with
a = k+alpha+1, b = n-k+beta+1, c = -mu, d = -nu, e = -n-gamma. The kernel
takes a different closed form in each of five regions of the (s, t) plane.
For c, d < 0 the integrals are read as Hadamard finite parts, which is what
the closed forms continue to.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._rows import levin_sum, row_sum_a
from .errors import ConvergenceError, DivergenceError, ParameterError, RegionError
from .hyp2var import f2_array, f3_array, f3ext_array, fp_array, fq, h2_array
from .ortho_deriv import jacobi_norm_ratio
from .quad_oracle import integrate_kernel_region, leg_rule, triangle_rule, unit_rule
from .scalar_special import (beta2, beta3, gamma, gamma_ratio, hyp2f1_array,
                             hyp3f2, hyp3f2_unit, is_nonpos_int, rgamma)
from .settings import resolve_tol

# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class KernelParams:
    a: float
    b: float
    c: float
    d: float
    e: float

    @classmethod
    def from_deriv(cls, alpha, beta, gamma, k, n, mu, nu):
        """Kernel parameters of the triangle derivative of order (k, n-k)."""
        return cls(k + alpha + 1.0, n - k + beta + 1.0, -mu, -nu, -n - gamma)

    def to_deriv(self, k, n):
        """Inverse of from_deriv for given orders: (alpha, beta, gamma, k, n, mu, nu)."""
        return (self.a - k - 1.0, self.b - n + k - 1.0, -self.e - n, k, n, -self.c, -self.d)

    def swapped(self):
        """Parameters with the roles of s and t exchanged."""
        return KernelParams(self.b, self.a, self.d, self.c, self.e)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d, self.e)


class RegionTag(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    OUTSIDE = "OUTSIDE"


@dataclass(frozen=True)
class FracSpec:
    """Orders and weights of a fractional derivative.

    Square form: give m and l; weight = (alpha, beta, gamma, delta_w) with
    (alpha, beta) on the x-axis (order m-l, fraction mu) and (gamma, delta_w)
    on the y-axis (order l, fraction nu).
    Triangle form: give k and n; weight = (alpha, beta, gamma).
    """

    mu: float
    nu: float
    delta: float
    weight: tuple
    m: int = None
    l: int = None
    k: int = None
    n: int = None

    def __post_init__(self):
        square = self.m is not None or self.l is not None
        triangle = self.k is not None or self.n is not None
        if square == triangle:
            raise ParameterError("give either (m, l) or (k, n)")
        if not self.delta > 0:
            raise ParameterError("delta must be positive")
        if not (self.mu > 0 and self.nu > 0):
            raise ParameterError("fractional orders must be positive")
        if min(self.weight) <= -1:
            raise ParameterError("weight exponents must exceed -1")
        if square:
            if self.m is None or self.l is None or len(self.weight) != 4:
                raise ParameterError("square form needs m, l and four weight exponents")
            if not (self.m - self.l - self.mu > 0 and self.l - self.nu > 0):
                raise ParameterError("need m - l - mu > 0 and l - nu > 0")
        else:
            if self.k is None or self.n is None or len(self.weight) != 3:
                raise ParameterError("triangle form needs k, n and three weight exponents")
            if not (0 <= self.k <= self.n):
                raise ParameterError("need 0 <= k <= n")
            if not (self.k - self.mu > 0 and self.n - self.k - self.nu > 0):
                raise ParameterError("need k - mu > 0 and n - k - nu > 0")
            if not (self.mu < 1 and self.nu < 1):
                raise ParameterError("triangle kernels support fractional orders below 1")

    @property
    def domain(self):
        return "square" if self.m is not None else "triangle"

    def kernel_params(self):
        alpha, beta, gamma_w = self.weight
        return KernelParams.from_deriv(alpha, beta, gamma_w, self.k, self.n, self.mu, self.nu)


def _params(p):
    return p if isinstance(p, KernelParams) else KernelParams(*p)


# ---------------------------------------------------------------- regions


def region_classify(s, t):
    """Region of (s, t); boundary points go to the region whose formula
    extends to them (s+t=1 -> I, t=1 -> III, s=1 -> IV, s=1 or t=1 beyond
    the unit square -> II)."""
    s, t = float(s), float(t)
    if not (s > 0 and t > 0):
        return RegionTag.OUTSIDE
    if s < 1:
        if t <= 1 - s:
            return RegionTag.I
        if t < 1:
            return RegionTag.V
        return RegionTag.III
    if t < 1:
        return RegionTag.IV
    return RegionTag.II


def _on_boundary(s, t):
    return s == 1.0 or t == 1.0 or (s < 1 and t == 1.0 - s)


_STRICT = {
    # conditions stated with each closed form; for III and IV the condition
    # 1 - e > 0 used in their derivation is added
    RegionTag.I: lambda a, b, c, d, e: min(a, b, c, d) > 0,
    RegionTag.II: lambda a, b, c, d, e: min(a, b, 1 - e) > 0,
    RegionTag.III: lambda a, b, c, d, e: min(a, b, c, 1 - e) > 0,
    RegionTag.IV: lambda a, b, c, d, e: min(a, b, d, 1 - e) > 0,
    RegionTag.V: lambda a, b, c, d, e: all(0 < v < 1 for v in (a, b, c, d, e)),
}


def check_kernel_params(region, p, strict=False):
    """Raise ParameterError unless p is admissible for the region kernel.

    strict=True enforces the convergence conditions of the plain integrals.
    The default accepts the wider set on which the closed forms continue the
    integrals: a, b > 0, e < 1, and c, d in (-1, inf) without 0.
    """
    a, b, c, d, e = _params(p).as_tuple()
    tag = RegionTag(region)
    if tag is RegionTag.OUTSIDE:
        return
    if strict:
        if not _STRICT[tag](a, b, c, d, e):
            raise ParameterError(f"parameters {(a, b, c, d, e)} violate the region {tag.value} conditions")
        return
    if not (a > 0 and b > 0 and e < 1 and c > -1 and d > -1 and c != 0 and d != 0):
        raise ParameterError("kernel needs a, b > 0, e < 1 and c, d in (-1, 0) or (0, inf)")


# ------------------------------------------------------- closed-form kernels


def _k1(p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    return (beta2(a, c) * beta2(b, d) * s ** (a + c - 1) * t ** (b + d - 1)
            * f2_array(e, a, b, a + c, b + d, s, t, tol))


def _k2(p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    return (beta3(a, b, 1 - e) * s ** (c - 1) * t ** (d - 1)
            * f3_array(a, b, 1 - c, 1 - d, a + b + 1 - e, 1 / s, 1 / t, tol))


def _k3(p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    return (beta2(a, c) * beta2(b, 1 - e) * s ** (a + c - 1) * t ** (d - 1)
            * h2_array(e - b, a, 1 - d, b, a + c, s, -1 / t, tol))


def _k4(p, s, t, tol):
    return _k3(p.swapped(), t, s, tol)


def _l_terms(p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    r = s + t - 1
    l1 = s ** (a + c - 1) * t ** (b + d - 1) * fp_array(e, b, a, b + d, a + c, t, s, tol)
    l2 = (s ** (a - 1) * (1 - s) ** (b + c - e) * t ** (d - 1)
          * f3_array(1 - a, b, c, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol))
    l3 = (s ** (a - 1) * t ** (b - 1) * r ** (c + d - e)
          * f3_array(1 - a, 1 - b, c, d, c + d - e + 1, r / s, r / t, tol))
    return l1, l2, l3


def _k56_oriented(p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    if float(e - c).is_integer():
        raise ParameterError("region-V kernel formula is degenerate when e - c is an integer")
    l1, l2, l3 = _l_terms(p, s, t, tol)
    return (beta2(c, e - c) * beta2(b, c - e + 1) * l2 + beta2(a, c - e) * beta2(b, d) * l1
            + beta2(1 - e, e - c) * beta2(d, 1 - e + c) * l3)


def _k56(p, s, t, tol):
    # the second F3 argument of L2 is (s-1)/s, which drops below -1 for s < 1/2;
    # the kernel is symmetric under (a, c, s) <-> (b, d, t), so each point is
    # evaluated with the larger coordinate first, keeping that argument in [-1, 0).
    # An orientation whose formula is degenerate is never used.
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    out = np.empty(s.shape)
    flip = s < t
    if float(p.e - p.d).is_integer():
        flip = np.zeros(s.shape, dtype=bool)
    elif float(p.e - p.c).is_integer():
        flip = np.ones(s.shape, dtype=bool)
    if (~flip).any():
        out[~flip] = _k56_oriented(p, s[~flip], t[~flip], tol)
    if flip.any():
        out[flip] = _k56_oriented(p.swapped(), t[flip], s[flip], tol)
    return out


_INTERIOR = {RegionTag.I: _k1, RegionTag.II: _k2, RegionTag.III: _k3,
             RegionTag.IV: _k4, RegionTag.V: _k56}


def kernel_values(region, p, s, t, tol=None):
    """Closed-form kernel on arrays of points strictly inside one region."""
    tol = resolve_tol(tol)
    p = _params(p)
    tag = RegionTag(region)
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    if tag is RegionTag.OUTSIDE:
        return np.zeros(s.shape)
    return _INTERIOR[tag](p, s, t, tol)


def _unit_rows(num, den, o, a, step, b, c, z, tol):
    """Rows whose ratio tends to one: summed directly when they decay fast
    enough, otherwise extrapolated from their leading terms."""
    o, zz = np.array([float(o)]), np.array([float(z)])
    try:
        v, _, _ = row_sum_a(num, den, o, a, step, b, c, zz, tol * 1e-2, max_rows=5000)
        return float(v[0])
    except ConvergenceError:
        terms = row_sum_a(num, den, o, a, step, b, c, zz, tol, fixed_rows=80)[:, 0]
        return levin_sum(terms)[0]


def _h2_unit_y(a, b1, b2, c1, c2, x, tol):
    """H2(a,b1,b2,c1,c2; x, -1) for 0 < x < 1, by rows that decay like a power."""
    return _unit_rows([b2, c1], [1.0 - a], 1.0, a, -1, b1, c2, x, tol)


def _f3_unit_x(a1, a2, b1, b2, c, y, tol):
    """F3(a1,a2,b1,b2;c; 1, y): Gauss summation of every row leaves a 3F2."""
    pre = gamma_ratio([c, c - a1 - b1], [c - a1, c - b1])
    if y == 1.0:
        return pre * hyp3f2_unit(a2, b2, c - a1 - b1, c - a1, c - b1, tol).value
    return pre * hyp3f2(a2, b2, c - a1 - b1, c - a1, c - b1, y, tol).value


def _boundary_value(tag, p, s, t, tol):
    a, b, c, d, e = p.as_tuple()
    if tag is RegionTag.I:
        # s + t = 1: F2 rows at ratio one decay like a power of c+d-e
        if not c + d - e > 0:
            raise DivergenceError("kernel is unbounded on s + t = 1 when c + d - e <= 0")
        v = _unit_rows([e, a], [a + c], s, e, 1, b, b + d, t, tol)
        return beta2(a, c) * beta2(b, d) * s ** (a + c - 1) * t ** (b + d - 1) * v
    if tag is RegionTag.IV:
        # s = 1, 0 < t < 1
        if not b + c - e > 0:
            raise DivergenceError("kernel is unbounded on s = 1 when b + c - e <= 0")
        h = _h2_unit_y(e - a, b, 1 - c, a, b + d, t, tol)
        return beta2(a, 1 - e) * beta2(b, d) * t ** (b + d - 1) * h
    if tag is RegionTag.III:
        if not a + d - e > 0:
            raise DivergenceError("kernel is unbounded on t = 1 when a + d - e <= 0")
        h = _h2_unit_y(e - b, a, 1 - d, b, a + c, s, tol)
        return beta2(a, c) * beta2(b, 1 - e) * s ** (a + c - 1) * h
    # region II with s = 1 or t = 1
    pre = beta3(a, b, 1 - e) * s ** (c - 1) * t ** (d - 1)
    cc = a + b + 1 - e
    if s == 1.0:
        return pre * _f3_unit_x(a, b, 1 - c, 1 - d, cc, 1 / t, tol)
    return pre * _f3_unit_x(b, a, 1 - d, 1 - c, cc, 1 / s, tol)


def kernel_closed_form(region, p, s, t, tol=None, strict=False):
    """Kernel value at (s, t) from its closed form.

    region: RegionTag or its name, or None to classify (s, t). Region V
    gives the sum of the two region-V pieces. Boundary points are evaluated
    with the formula of the region they are assigned to by region_classify.
    """
    tol = resolve_tol(tol)
    p = _params(p)
    s, t = float(s), float(t)
    where = region_classify(s, t)
    tag = where if region is None else RegionTag(region)
    if tag is not where:
        raise RegionError(f"(s, t) = ({s}, {t}) lies in region {where.value}, not {tag.value}")
    if tag is RegionTag.OUTSIDE:
        return 0.0
    check_kernel_params(tag, p, strict)
    if _on_boundary(s, t):
        return float(_boundary_value(tag, p, s, t, tol))
    return float(_INTERIOR[tag](p, np.array([s]), np.array([t]), tol)[0])


def kernel_l_form(p, s, t, tol=None):
    """Region-V kernel from its three-term form, evaluated in the given
    orientation. kernel_closed_form instead evaluates every point with the
    larger coordinate first; this one can be slow when s < 1/2 and s + t is
    close to 1."""
    tol = resolve_tol(tol)
    p = _params(p)
    s, t = float(s), float(t)
    _require_v(s, t)
    check_kernel_params(RegionTag.V, p)
    return float(_k56_oriented(p, np.array([s]), np.array([t]), tol)[0])


def _require_v(s, t):
    if region_classify(s, t) is not RegionTag.V or _on_boundary(s, t):
        raise RegionError(f"(s, t) = ({s}, {t}) is not inside region V")


def kernel_i5_i6_split(p, s, t, tol=None):
    """The two region-V pieces separately; each carries an extended-F3 term
    that cancels in the sum."""
    tol = resolve_tol(tol)
    p = _params(p)
    s, t = float(s), float(t)
    _require_v(s, t)
    check_kernel_params(RegionTag.V, p)
    a, b, c, d, e = p.as_tuple()
    S, T = np.array([s]), np.array([t])
    l1, l2, l3 = (float(v[0]) for v in _l_terms(p, S, T, tol))
    r = s + t - 1
    ft = (s ** (a + c - e - 1) * t ** (b - 1) * r ** d
          * float(f3ext_array(1, 1 - b, e - a - c + 1, d, d + 1, e, e - c + 1,
                              np.array([r / s]), np.array([r / t]), tol)[0]))
    shared = beta2(a, c - e) / d * ft
    i5 = beta2(c, e - c) * beta2(b, c - e + 1) * l2 + beta2(a, c - e) * beta2(b, d) * l1 - shared
    i6 = shared + beta2(1 - e, e - c) * beta2(d, 1 - e + c) * l3
    return i5, i6


def kernel_symmetric_form(p, s, t, tol=None):
    """Region-V kernel as a combination of four terms symmetric under
    (a, b, c, d, s, t) -> (b, a, d, c, t, s). Needs c - d not an integer."""
    tol = resolve_tol(tol)
    p = _params(p)
    s, t = float(s), float(t)
    _require_v(s, t)
    check_kernel_params(RegionTag.V, p)
    a, b, c, d, e = p.as_tuple()
    if float(c - d).is_integer():
        raise ParameterError("symmetric form is degenerate when c - d is an integer")
    S, T = np.array([s]), np.array([t])
    A1 = gamma_ratio([a, b, e, c - d, d - c + 1, 1 - e], [a + c - e, b + d, 1 - d, e - c + 1])
    A2 = gamma_ratio([a, b, e, d - c, c - d + 1, 1 - e], [b + d - e, a + c, 1 - c, e - d + 1])
    A3 = gamma_ratio([a, d, c - d, d - c + 1, 1 - e], [c, 1 - c, a + d - e + 1])
    A4 = gamma_ratio([b, c, d - c, c - d + 1, 1 - e], [d, 1 - d, c + b - e + 1])
    pre = s ** (a + c - 1) * t ** (b + d - 1)
    T1 = pre * fp_array(e, b, a, b + d, a + c, T, S, tol)[0]
    T2 = pre * fp_array(e, a, b, a + c, b + d, S, T, tol)[0]
    T3 = (t ** (b - 1) * (1 - t) ** (a + d - e) * s ** (c - 1)
          * f3_array(d, a, 1 - b, 1 - c, a + d - e + 1, (T - 1) / T, (1 - T) / S, tol)[0])
    T4 = (s ** (a - 1) * (1 - s) ** (b + c - e) * t ** (d - 1)
          * f3_array(c, b, 1 - a, 1 - d, b + c - e + 1, (S - 1) / S, (1 - S) / T, tol)[0])
    return float(A1 * T1 + A2 * T2 + A3 * T3 + A4 * T4)


def kernel_fq_form(p, s, t, tol=None):
    """Region-V kernel through F_P, F_Q and F3; needs t < 2s - 1 for the F_Q series."""
    tol = resolve_tol(tol)
    p = _params(p)
    s, t = float(s), float(t)
    _require_v(s, t)
    check_kernel_params(RegionTag.V, p)
    a, b, c, d, e = p.as_tuple()
    S, T = np.array([s]), np.array([t])
    l1, l2, _ = (float(v[0]) for v in _l_terms(p, S, T, tol))
    r = s + t - 1
    q = fq(e, c, d, a + c, b + d, s / r, t / r, tol).value
    return (beta2(a, c - e) * beta2(b, d) * l1
            + beta2(1 - e, e - c) * beta2(d, c - e + b) * s ** (a + c - 1) * t ** (b + d - 1)
            * r ** (-e) * q
            + beta2(e - b - c, c) * beta2(1 - e, b) * l2)


# ----------------------------------------------------------- Jacobi kernels


def _check_j(lam, alpha, beta, nu):
    if lam < 0 or int(lam) != lam:
        raise ParameterError("lambda must be a non-negative integer")
    if not (alpha > -1 and beta > -1):
        raise ParameterError("Jacobi exponents must exceed -1")
    if not lam - nu > 0:
        raise ParameterError("need lambda - nu > 0")


def _j1_pre(lam, alpha, beta, nu):
    return ((-1) ** lam * gamma_ratio([lam + beta + 1, lam - nu], [lam - nu + beta + 1])
            / (2.0 ** (lam - nu) * math.factorial(lam)))


def _j2_pre(lam, alpha, beta, nu):
    return ((-1) ** lam * 2.0 ** (lam + alpha + beta + 1) * gamma(lam - nu) * rgamma(-nu)
            / math.factorial(lam)
            * gamma_ratio([lam + alpha + 1, lam + beta + 1], [2 * lam + alpha + beta + 2]))


def _j1(xi, lam, alpha, beta, nu):
    z = (1 + xi) / 2
    return (_j1_pre(lam, alpha, beta, nu) * (1 - xi) ** (lam + alpha - nu) * (1 + xi) ** (lam + beta - nu)
            * hyp2f1_array(-nu, 2 * lam - nu + alpha + beta + 1, lam - nu + beta + 1, z))


def _j2(xi, lam, alpha, beta, nu):
    return (_j2_pre(lam, alpha, beta, nu) * (xi + 1) ** (-nu - 1)
            * hyp2f1_array(nu + 1, lam + beta + 1, 2 * lam + alpha + beta + 2, 2 / (xi + 1)))


def j_kernel(which, xi, lam, alpha, beta, nu):
    """Fractional integral of the weighted Jacobi polynomial,
    int (xi-u)^(lam-nu-1) P_lam^(alpha,beta)(u) (1-u)^alpha (1+u)^beta du
    over -1 < u < min(xi, 1). J1 covers -1 < xi < 1 and J2 covers xi > 1."""
    _check_j(lam, alpha, beta, nu)
    xi = np.asarray(xi, dtype=float)
    if which == "J1":
        if not np.all((xi > -1) & (xi < 1)):
            raise RegionError("J1 needs -1 < xi < 1")
        out = _j1(xi, lam, alpha, beta, nu)
    elif which == "J2":
        if not np.all(xi > 1):
            raise RegionError("J2 needs xi > 1")
        out = _j2(xi, lam, alpha, beta, nu)
    else:
        raise ParameterError(f"unknown kernel {which!r}")
    return float(out) if out.ndim == 0 else out


def _j_axis_shell0(lam, alpha, beta, nu, n):
    """Nodes and kernel-weighted weights on [-1, 2] for one square axis.

    Near xi = 1 each kernel is a smooth part plus |1-xi|^q times a smooth
    part, q = lam+alpha-nu; the two parts get separate Gauss rules.
    """
    q = lam + alpha - nu
    pb = lam + beta - nu
    xs, ws = [], []
    x, w = leg_rule(n, -1.0, 0.0, pb, 0.0)
    xs.append(x)
    ws.append(w * _j1(x, lam, alpha, beta, nu) / (1 + x) ** pb)
    if float(q).is_integer():
        # logarithmic case of the connection formula: plain rules
        for lo, hi in ((0.0, 1.0), (1.0, 2.0)):
            x, w = leg_rule(2 * n, lo, hi)
            ker = _j1 if hi == 1.0 else _j2
            xs.append(x)
            ws.append(w * ker(x, lam, alpha, beta, nu))
        return np.concatenate(xs), np.concatenate(ws)
    # J1 on [0, 1]: 2F1(A, B; C; z) with z = (1+xi)/2, C - A - B = -q
    A, B, C = -nu, 2 * lam - nu + alpha + beta + 1, lam - nu + beta + 1
    g1 = gamma(C) * gamma(-q) * rgamma(C - A) * rgamma(C - B)
    g2 = gamma(C) * gamma(q) * rgamma(A) * rgamma(B)
    pre = _j1_pre(lam, alpha, beta, nu)
    x, w = leg_rule(n, 0.0, 1.0, 0.0, q)
    if g1 != 0.0:
        xs.append(x)
        ws.append(w * pre * g1 * (1 + x) ** pb * hyp2f1_array(A, B, 1 + q, (1 - x) / 2))
    x, w = leg_rule(n, 0.0, 1.0)
    xs.append(x)
    ws.append(w * pre * g2 * 2.0 ** q * (1 + x) ** pb * hyp2f1_array(C - A, C - B, 1 - q, (1 - x) / 2))
    # J2 on [1, 2]: 2F1(A, B; C; 2/(xi+1)), C - A - B = q
    A, B, C = nu + 1, lam + beta + 1, 2 * lam + alpha + beta + 2
    g1 = gamma(C) * gamma(q) * rgamma(C - A) * rgamma(C - B)
    g2 = gamma(C) * gamma(-q) * rgamma(A) * rgamma(B)
    pre = _j2_pre(lam, alpha, beta, nu)
    x, w = leg_rule(n, 1.0, 2.0)
    xs.append(x)
    ws.append(w * pre * g1 * (x + 1) ** (-nu - 1) * hyp2f1_array(A, B, 1 - q, (x - 1) / (x + 1)))
    x, w = leg_rule(n, 1.0, 2.0, q, 0.0)
    xs.append(x)
    ws.append(w * pre * g2 * (x + 1) ** (-nu - 1 - q) * hyp2f1_array(C - A, C - B, 1 + q, (x - 1) / (x + 1)))
    return np.concatenate(xs), np.concatenate(ws)


def _j_axis_panel(k, lam, alpha, beta, nu, n):
    lo, hi = 1.0 + 2.0 ** (k - 1), 1.0 + 2.0 ** k
    x, w = leg_rule(n, lo, hi)
    return x, w * _j2(x, lam, alpha, beta, nu)


# ------------------------------------------------------ improper integrals

_SHELL_TOL = 1e-13
_MAX_SHELLS = 60


def _shell_sum(shell, max_shells=_MAX_SHELLS):
    """Sum shell(0) + shell(1) + ... until two shells in a row are negligible.

    Returns (total, tail bound). Raises ConvergenceError when the sum has not
    settled after max_shells shells, which signals too slow a decay of f.
    """
    total = shell(0)
    quiet, last = 0, abs(total)
    for K in range(1, max_shells + 1):
        c = shell(K)
        total += c
        quiet = quiet + 1 if abs(c) <= _SHELL_TOL * abs(total) else 0
        if quiet >= 2:
            return total, abs(c) + last
        last = abs(c)
    raise ConvergenceError("truncated integral did not settle: f does not decay fast enough")


def _sample(f, X, Y):
    vals = np.asarray(f(X, Y), dtype=float)
    vals = np.broadcast_to(vals, np.broadcast(X, Y).shape)
    if not np.all(np.isfinite(vals)):
        raise RegionError("function is not finite on the sampling region")
    return vals


def w_delta_square(f, x, y, spec, delta=None, n_nodes=24, return_tail=False):
    """Fractional Jacobi derivative on the square at finite delta.

    The x-axis carries order m-l, exponents (alpha, beta) and fraction mu;
    the y-axis order l, exponents (gamma, delta_w) and fraction nu. f takes
    broadcast arrays and must decay along x, y -> +inf.
    """
    if spec.domain != "square":
        raise ParameterError("w_delta_square needs a square-form FracSpec")
    delta = spec.delta if delta is None else float(delta)
    if not delta > 0:
        raise ParameterError("delta must be positive")
    m, l, mu, nu = spec.m, spec.l, spec.mu, spec.nu
    al, be, ga, dw = spec.weight
    lx, ly = m - l, l
    coef = ((-1) ** m * math.factorial(lx) * math.factorial(ly)
            / (jacobi_norm_ratio(lx, al, be) * jacobi_norm_ratio(ly, ga, dw))
            * rgamma(lx - mu) * rgamma(ly - nu) * delta ** (-mu - nu))
    cache_x, cache_y = {}, {}

    def axis(cache, k, lam, a1, b1, frac):
        if k not in cache:
            if k == 0:
                cache[k] = _j_axis_shell0(lam, a1, b1, frac, n_nodes)
            else:
                cache[k] = _j_axis_panel(k, lam, a1, b1, frac, n_nodes)
        return cache[k]

    def block(i, j):
        sx, wx = axis(cache_x, i, lx, al, be, mu)
        ty, wy = axis(cache_y, j, ly, ga, dw, nu)
        vals = _sample(f, x + delta * sx[:, None], y + delta * ty[None, :])
        return float(wx @ vals @ wy)

    def shell(K):
        return (sum(block(i, K) for i in range(K)) + sum(block(K, j) for j in range(K))
                + block(K, K))

    total, tail = _shell_sum(shell)
    value = coef * total
    return (value, abs(coef) * tail) if return_tail else value


def _t_panel(k):
    return 1.0 + 0.5 * (2.0 ** (k - 1) - 1.0), 1.0 + 0.5 * (2.0 ** k - 1.0)


def w_delta_triangle(f, x, y, spec, n_nodes=24, return_tail=False, kernel="closed",
                     oracle_nodes=32, tol=None):
    """Fractional orthogonal derivative on the triangle at finite delta.

    The kernel is integrated against f(x + delta s, y + delta t) over the
    five regions; the unbounded ones are cut into panels of doubling width
    until further panels no longer contribute. kernel="oracle" replaces the
    closed forms by integrate_kernel_region (slow, for cross-checks).
    """
    if spec.domain != "triangle":
        raise ParameterError("w_delta_triangle needs a triangle-form FracSpec")
    tol = resolve_tol(tol)
    p = spec.kernel_params()
    check_kernel_params(RegionTag.V, p)
    a, b, c, d, e = p.as_tuple()
    delta = spec.delta
    coef = (delta ** (-spec.mu - spec.nu) / beta3(a, b, 1 - e)
            * rgamma(-spec.mu) * rgamma(-spec.nu))
    n_panel = max(8, n_nodes // 2 + 4)

    if kernel == "closed":
        def K(tag, S, T):
            return kernel_values(tag, p, S, T, tol)
    elif kernel == "oracle":
        def K(tag, S, T):
            S, T = np.broadcast_arrays(S, T)
            out = [integrate_kernel_region(tag.value, p, si, ti, oracle_nodes)
                   for si, ti in zip(S.ravel(), T.ravel())]
            return np.reshape(out, S.shape)
    else:
        raise ParameterError(f"unknown kernel source {kernel!r}")

    def fsum(S, T, W, tag):
        vals = _sample(f, x + delta * S, y + delta * T)
        return float(np.sum(W * vals * K(tag, S, T)))

    A, B = a + c - 1, b + d - 1
    s_unit, ws_unit = unit_rule(n_nodes, A, 0.0)
    t_unit, wt_unit = unit_rule(n_nodes, B, 0.0)

    def panel(k):
        lo, hi = _t_panel(k)
        return leg_rule(n_panel, lo, hi)

    def shell(Kk):
        if Kk == 0:
            rule = triangle_rule(n_nodes, A, B, 0.0)
            W = rule.weights * beta3(A + 1, B + 1, 1.0) / (rule.x ** A * rule.y ** B)
            part_i = fsum(rule.x, rule.y, W, RegionTag.I)
            rule = triangle_rule(n_nodes, 0.0, 0.0, 0.0)
            part_v = fsum(1 - rule.x, 1 - rule.y, 0.5 * rule.weights, RegionTag.V)
            return part_i + part_v
        tk, wk = panel(Kk)
        S = s_unit[:, None]
        part_iii = fsum(S, tk[None, :], (ws_unit / s_unit ** A)[:, None] * wk[None, :], RegionTag.III)
        T = t_unit[None, :]
        part_iv = fsum(tk[:, None], T, wk[:, None] * (wt_unit / t_unit ** B)[None, :], RegionTag.IV)
        part_ii = 0.0
        for j in range(1, Kk + 1):
            sj, wj = panel(j)
            part_ii += fsum(tk[:, None], sj[None, :], wk[:, None] * wj[None, :], RegionTag.II)
            if j < Kk:
                part_ii += fsum(sj[:, None], tk[None, :], wj[:, None] * wk[None, :], RegionTag.II)
        return part_iii + part_iv + part_ii

    total, tail = _shell_sum(shell)
    value = coef * total
    return (value, abs(coef) * tail) if return_tail else value
