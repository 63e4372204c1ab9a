"""Gamma-family utilities and one-variable hypergeometric series."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import ConvergenceError, DivergenceError, PoleError
from .settings import MAX_TERMS, resolve_tol


@dataclass(frozen=True)
class SeriesValue:
    """Result of a truncated series."""

    value: float
    terms_used: int
    err_estimate: float
    converged: bool

    def __float__(self):
        return float(self.value)


def is_nonpos_int(x):
    return float(x) <= 0 and float(x) == math.floor(x)


def log_gamma(x):
    """Return (log|Gamma(x)|, sign of Gamma(x))."""
    x = float(x)
    if is_nonpos_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    sign = -1 if math.floor(x) % 2 else 1
    return math.lgamma(x), sign


def gamma(x):
    x = float(x)
    if is_nonpos_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 171.0:
        return math.gamma(x)
    lg, sign = log_gamma(x)
    return sign * math.exp(lg)


def rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if is_nonpos_int(x):
        return 0.0
    lg, sign = log_gamma(x)
    return sign * math.exp(-lg)


def gamma_ratio(num, den):
    """prod Gamma(num) / prod Gamma(den) in log space.

    A pole in `den` gives 0; a pole in `num` raises PoleError.
    """
    for x in den:
        if is_nonpos_int(x):
            for y in num:
                if is_nonpos_int(y):
                    raise PoleError("indeterminate Gamma ratio")
            return 0.0
    total, sign = 0.0, 1
    for x in num:
        lg, s = log_gamma(x)
        total += lg
        sign *= s
    for x in den:
        lg, s = log_gamma(x)
        total -= lg
        sign *= s
    return sign * math.exp(total)


def pochhammer(a, shift):
    """Rising factorial (a)_shift.

    Integer shifts use the finite product, negative ones the reflection
    (a)_{-i} = (-1)^i / (1-a)_i. Real shifts go through Gamma ratios.
    """
    a = float(a)
    if float(shift) != math.floor(shift):
        return _poch_gamma(a, float(shift))
    n = int(shift)
    if n >= 0:
        p = 1.0
        for k in range(n):
            p *= a + k
        return p
    i = -n
    den = pochhammer(1.0 - a, i)
    if den == 0.0:
        raise PoleError(f"({a})_{n} has a pole")
    return (-1.0) ** i / den


def _poch_gamma(a, b):
    if is_nonpos_int(a + b) and not is_nonpos_int(a):
        return 0.0
    if is_nonpos_int(a):
        raise PoleError(f"({a})_{b} has a pole")
    return gamma_ratio([a + b], [a])


def log_pochhammer(a, n):
    """(log|(a)_n|, sign) for integer n >= 0; log is -inf when the product vanishes."""
    total, sign = 0.0, 1
    for k in range(n):
        f = a + k
        if f == 0.0:
            return -math.inf, 0
        total += math.log(abs(f))
        if f < 0:
            sign = -sign
    return total, sign


def beta2(x, y):
    return beta3(x, y, None)


def beta3(x, y, z):
    """B(x,y,z) = Gamma(x)Gamma(y)Gamma(z)/Gamma(x+y+z); z=None gives B(x,y)."""
    args = [x, y] if z is None else [x, y, z]
    total = sum(args)
    for v in args + [total]:
        if is_nonpos_int(v):
            raise PoleError(f"Beta argument {v} is a Gamma pole")
    return gamma_ratio(args, [total])


# ---------------------------------------------------------------- 2F1

# internal series are always summed to working precision
_EPS = 1e-17
_DIRECT_MAX = 0.8
_NEAR_TERMS = 20000

def _series_2f1(a, b, c, z, tol, max_terms=MAX_TERMS, with_size=False):
    """Plain Gauss series, vectorized over z. Returns (values, terms, err, converged),
    plus the sum of absolute terms when with_size is set."""
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    size = np.ones_like(z)
    term = np.ones_like(z)
    small = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    last = np.zeros_like(z)
    k = 0
    while active.any():
        if k >= max_terms:
            break
        factor = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = np.where(active, term * factor * z, term)
        total = np.where(active, total + term, total)
        mag = np.abs(term)
        size = np.where(active, size + mag, size)
        ok = mag <= tol * np.abs(total)
        small = np.where(active, np.where(ok, small + 1, 0), small)
        last = np.where(active, mag, last)
        k += 1
        active = active & (small < 3)
    if with_size:
        return total, k + 1, last, ~active, size
    return total, k + 1, last, ~active


def _terminating_order(a, b):
    orders = [int(-p) for p in (a, b) if is_nonpos_int(p)]
    return min(orders) if orders else None


def _poly_2f1(a, b, c, z, order):
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(order):
        if c + k == 0:
            raise PoleError(f"2F1 lower parameter {c} hits a pole before termination")
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total = total + term
    return total


def _connection(a, b, c, z, tol):
    """0.5 < z < 1 via the 1-z connection formula."""
    m = c - a - b
    if abs(m - round(m)) < 1e-5:
        # integer c-a-b: symmetric perturbation in b with Richardson
        h = 1e-4
        f1 = 0.5 * (_connection_regular(a, b + h, c, z, tol) + _connection_regular(a, b - h, c, z, tol))
        f2 = 0.5 * (_connection_regular(a, b + 2 * h, c, z, tol) + _connection_regular(a, b - 2 * h, c, z, tol))
        return (4.0 * f1 - f2) / 3.0
    return _connection_regular(a, b, c, z, tol)


def _connection_regular(a, b, c, z, tol):
    out, _ = _connection_parts(a, b, c, z, tol)
    return out


def _connection_parts(a, b, c, z, tol):
    """Connection-formula value and the summed magnitude of its two terms."""
    w = 1.0 - z
    m = c - a - b
    A = gamma_ratio([c, m], [c - a, c - b])
    B = gamma_ratio([c, -m], [a, b])
    out = np.zeros_like(w)
    size = np.zeros_like(w)
    with np.errstate(over="ignore", invalid="ignore"):
        if A != 0.0:
            t = A * _hyp2f1_vec(a, b, 1.0 - m, w, tol)
            out, size = out + t, size + np.abs(t)
        if B != 0.0:
            t = B * w ** m * _hyp2f1_vec(c - a, c - b, m + 1.0, w, tol)
            out, size = out + t, size + np.abs(t)
    return out, size


def _near_one(a, b, c, z, tol):
    """0.8 < z < 1. The Maclaurin series is used where it converges within a
    bounded number of terms without cancellation; this covers large c, where the
    two connection-formula terms cancel. Remaining points use the connection formula."""
    vals, _, _, conv, size = _series_2f1(a, b, c, z, _EPS, max_terms=_NEAR_TERMS, with_size=True)
    good = conv & (size <= 1e3 * np.abs(vals))
    out = np.where(good, vals, 0.0)
    if not good.all():
        out[~good] = _connection(a, b, c, z[~good], tol)
    return out


def _hyp2f1_vec(a, b, c, z, tol):
    z = np.asarray(z, dtype=float)
    order = _terminating_order(a, b)
    if order is not None:
        return _poly_2f1(a, b, c, z, order)
    if is_nonpos_int(c):
        raise PoleError(f"2F1 lower parameter {c} is a non-positive integer")
    if np.any(z >= 1.0):
        bad = z[z >= 1.0]
        if np.all(bad == 1.0) and c - a - b > 0:
            pass
        else:
            raise DivergenceError("2F1 series diverges for z >= 1")
    out = np.empty_like(z)
    at_one = z == 1.0
    if at_one.any():
        out[at_one] = gamma_ratio([c, c - a - b], [c - a, c - b])
    # the 1-z connection formula cancels badly when c is large, so the
    # Maclaurin series is kept up to z = 0.8 (at most a few hundred terms)
    direct = (z >= -0.5) & (z <= _DIRECT_MAX)
    if direct.any():
        vals, _, _, conv = _series_2f1(a, b, c, z[direct], _EPS)
        if not conv.all():
            raise ConvergenceError("2F1 series did not converge")
        out[direct] = vals
    near = (z > _DIRECT_MAX) & (z < 1.0)
    if near.any():
        out[near] = _near_one(a, b, c, z[near], tol)
    neg = z < -0.5
    if neg.any():
        zn = z[neg]
        w = zn / (zn - 1.0)
        out[neg] = (1.0 - zn) ** (-a) * _hyp2f1_vec(a, c - b, c, w, tol)
    return out


def hyp2f1(a, b, c, z, tol=None):
    """Gauss hypergeometric function 2F1(a,b;c;z) for real arguments, z < 1."""
    tol = resolve_tol(tol)
    a, b, c, z = float(a), float(b), float(c), float(z)
    if z == 0.0:
        return SeriesValue(1.0, 1, 0.0, True)
    order = _terminating_order(a, b)
    if order is not None:
        val = float(_poly_2f1(a, b, c, np.array([z]), order)[0])
        return SeriesValue(val, order + 1, 0.0, True)
    if abs(z) <= 0.5:
        if is_nonpos_int(c):
            raise PoleError(f"2F1 lower parameter {c} is a non-positive integer")
        vals, n, last, conv = _series_2f1(a, b, c, np.array([z]), _EPS)
        err = float(last[0])
        return SeriesValue(float(vals[0]), int(n), err, bool(conv[0]) and err <= tol * abs(vals[0]))
    val = float(_hyp2f1_vec(a, b, c, np.array([z]), _EPS)[0])
    return SeriesValue(val, 0, 1e-15 * abs(val), True)


def hyp2f1_array(a, b, c, z, tol=None):
    """Vectorized 2F1 over an array of z (parameters scalar)."""
    tol = resolve_tol(tol)
    z = np.asarray(z, dtype=float)
    flat = _hyp2f1_vec(float(a), float(b), float(c), z.ravel(), _EPS)
    return flat.reshape(z.shape)


# ---------------------------------------------------------------- 3F2 at 1

def _algebraic_tail(terms, excess, degree=5):
    """Sum of t_k for k >= len(terms), from the large-k form t_k ~ k^(-1-s) P(1/k).

    The polynomial P is fitted on the second half of the computed terms and the
    tail is summed exactly with Hurwitz zeta values.
    """
    n = len(terms)
    k = np.arange(n // 2, n, dtype=float)
    r = terms[n // 2:] * k ** (1.0 + excess)
    y = n / k
    coef = np.polynomial.polynomial.polyfit(y, r, degree)
    m = np.arange(degree + 1)
    tail = np.sum(coef * float(n) ** m * hurwitz_zeta(1.0 + excess + m, n))
    resid = np.max(np.abs(np.polynomial.polynomial.polyval(y, coef) - r))
    return tail, resid * hurwitz_zeta(1.0 + excess, n)


def hyp3f2_unit(a1, a2, a3, b1, b2, tol=None):
    """3F2(a1,a2,a3;b1,b2;1): direct sum plus a fitted algebraic tail."""
    tol = resolve_tol(tol)
    nums = [float(a1), float(a2), float(a3)]
    dens = [float(b1), float(b2)]
    orders = [int(-p) for p in nums if is_nonpos_int(p)]
    if orders:
        n = min(orders)
        total, term = 1.0, 1.0
        for k in range(n):
            d = (dens[0] + k) * (dens[1] + k)
            if d == 0:
                raise PoleError("3F2 lower parameter hits a pole before termination")
            term *= (nums[0] + k) * (nums[1] + k) * (nums[2] + k) / (d * (k + 1.0))
            total += term
        return SeriesValue(total, n + 1, 0.0, True)
    for d in dens:
        if is_nonpos_int(d):
            raise PoleError(f"3F2 lower parameter {d} is a non-positive integer")
    excess = sum(dens) - sum(nums)
    if excess <= 0:
        raise DivergenceError("3F2 at unit argument needs positive parameter excess")

    n_direct = 2000
    k = np.arange(n_direct - 1, dtype=float)
    ratios = (nums[0] + k) * (nums[1] + k) * (nums[2] + k) / ((dens[0] + k) * (dens[1] + k) * (k + 1.0))
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.concatenate(([1.0], np.cumprod(ratios)))
    if not np.all(np.isfinite(terms)):
        raise ConvergenceError("3F2 terms overflow before the tail sets in")
    head = math.fsum(terms)
    # a k^(-1-s) tail starting at N is about N*|t_N|/s
    if n_direct * abs(terms[-1]) / excess <= 1e-17 * abs(head):
        return SeriesValue(head, n_direct, float(abs(terms[-1])), True)
    tail, err = _algebraic_tail(terms, excess)
    value = head + tail
    err = float(err) + 1e-15 * abs(value)
    return SeriesValue(float(value), n_direct, err, err <= tol * abs(value))


def hyp3f2(a1, a2, a3, b1, b2, z, tol=None):
    """3F2(a1,a2,a3;b1,b2;z) by its power series, |z| < 1 (z = 1 via hyp3f2_unit)."""
    tol = resolve_tol(tol)
    z = float(z)
    if z == 1.0:
        return hyp3f2_unit(a1, a2, a3, b1, b2, tol)
    if not abs(z) < 1:
        raise DivergenceError(f"3F2 power series diverges at z={z}")
    for d in (b1, b2):
        if is_nonpos_int(d) and not any(is_nonpos_int(p) and p > d for p in (a1, a2, a3)):
            raise PoleError(f"3F2 lower parameter {d} is a non-positive integer")
    total, term, quiet = 1.0, 1.0, 0
    for k in range(MAX_TERMS):
        term *= (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:
            return SeriesValue(total, k + 2, 0.0, True)
        ratio = min(abs(z) * abs((a1 + k + 1) * (a2 + k + 1) * (a3 + k + 1)
                                 / ((b1 + k + 1) * (b2 + k + 1) * (k + 2.0))), 0.999999)
        quiet = quiet + 1 if abs(term) / (1.0 - ratio) <= _EPS * abs(total) else 0
        if quiet >= 3:
            return SeriesValue(total, k + 2, abs(term), True)
    return SeriesValue(total, MAX_TERMS, abs(term), False)
