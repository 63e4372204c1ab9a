"""Independent reference values for the tests: brute-force truncated sums
whose coefficients are Gamma ratios evaluated in log space (scipy)."""

import numpy as np
from scipy.special import gammaln, gammasgn


class _Log:
    """A signed number kept as (log|v|, sign) so long products do not overflow."""

    def __init__(self, log, sign):
        self.log, self.sign = log, sign

    def __mul__(self, other):
        return _Log(self.log + other.log, self.sign * other.sign)

    def __truediv__(self, other):
        return _Log(self.log - other.log, self.sign * other.sign)


def poch(a, k):
    """(a)_k = Gamma(a+k)/Gamma(a) for integer arrays k of either sign."""
    k = np.asarray(k, dtype=float)
    return _Log(gammaln(a + k) - gammaln(a), gammasgn(a + k) * gammasgn(a))


def factorial(k):
    k = np.asarray(k, dtype=float)
    return _Log(gammaln(k + 1.0), np.ones_like(k))


def double_sum(coef, x, y, n=200):
    """sum_{i,j < n} coef(i, j) x^i y^j with i, j as broadcast integer grids."""
    i = np.arange(n)[:, None].astype(float)
    j = np.arange(n)[None, :].astype(float)
    c = coef(i, j)
    with np.errstate(divide="ignore"):
        log = c.log + i * np.log(abs(x)) + j * np.log(abs(y))
    sign = c.sign * np.sign(x) ** i * np.sign(y) ** j
    terms = np.where(sign == 0, 0.0, sign * np.exp(log))
    return float(np.sum(terms))


def f1_sum(a, b1, b2, c, x, y, n=200):
    return double_sum(lambda i, j: poch(a, i + j) * poch(b1, i) * poch(b2, j)
                      / (poch(c, i + j) * factorial(i) * factorial(j)), x, y, n)


def f2_sum(a, b1, b2, c1, c2, x, y, n=200):
    return double_sum(lambda i, j: poch(a, i + j) * poch(b1, i) * poch(b2, j)
                      / (poch(c1, i) * poch(c2, j) * factorial(i) * factorial(j)), x, y, n)


def f3_sum(a1, a2, b1, b2, c, x, y, n=200):
    return double_sum(lambda i, j: poch(a1, i) * poch(a2, j) * poch(b1, i) * poch(b2, j)
                      / (poch(c, i + j) * factorial(i) * factorial(j)), x, y, n)


def f3ext_sum(a1, a2, b1, b2, c, d1, d2, x, y, n=300):
    return double_sum(lambda i, j: poch(a1, i) * poch(a2, j) * poch(b1, i) * poch(b2, j)
                      * poch(d1, i) / (poch(c, i + j) * poch(d2, i)
                                           * factorial(i) * factorial(j)), x, y, n)


def h2_sum(a, b1, b2, c1, c2, x, y, n=120):
    return double_sum(lambda i, j: poch(a, i - j) * poch(b1, i) * poch(b2, j) * poch(c1, j)
                      / (poch(c2, i) * factorial(i) * factorial(j)), x, y, n)


def fp_sum(a, b1, b2, c1, c2, x, y, n=200):
    """F_P as the series in x and 1 - y."""
    return double_sum(lambda i, j: poch(a, i + j) * poch(a - c2 + 1, i) * poch(b2, j)
                      * poch(b1, i) / (poch(a + b2 - c2 + 1, i + j) * poch(c1, i)
                                       * factorial(i) * factorial(j)), x, 1.0 - y, n)


def single_sum(nums, dens, z, n=400):
    """sum_k prod (nums)_k / (prod (dens)_k k!) z^k."""
    k = np.arange(n, dtype=float)
    log, sign = np.zeros(n), np.ones(n)
    for a in nums:
        p = poch(a, k)
        log, sign = log + p.log, sign * p.sign
    for b in list(dens) + [1.0]:
        p = poch(b, k)
        log, sign = log - p.log, sign * p.sign
    with np.errstate(divide="ignore"):
        log = log + k * np.log(abs(z))
    return float(np.sum(sign * np.sign(z) ** k * np.exp(log)))
