"""Biorthogonal polynomial systems U and V on the triangle x, y >= 0, x + y <= 1.

The weight is x^alpha y^beta (1-x-y)^gamma, normalized to unit mass.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RegionError
from .quad_oracle import integrate_triangle
from .scalar_special import pochhammer

# beyond this degree the Pochhammer products grow quickly; values still work
# but lose relative accuracy
DEGREE_WARN = 8


@dataclass(frozen=True)
class TriangleWeight:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= -1:
            raise ParameterError("triangle weight exponents must exceed -1")

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma)


def _weight(w):
    if isinstance(w, TriangleWeight):
        return w
    return TriangleWeight(*w)


def _check_index(k, n):
    if not (0 <= k <= n) or int(k) != k or int(n) != n:
        raise ParameterError(f"need integers 0 <= k <= n, got k={k}, n={n}")
    if n > DEGREE_WARN:
        warnings.warn(f"degree {n} exceeds {DEGREE_WARN}; expect loss of accuracy", stacklevel=3)


def _check_simplex(x, y):
    tol = 1e-12
    if np.any(x < -tol) or np.any(y < -tol) or np.any(x + y > 1 + tol):
        raise RegionError("point outside the triangle x, y >= 0, x + y <= 1")


def u_poly(k, n, w, x, y, method="terminating"):
    """U_{k,n}(x, y) for the weight w = (alpha, beta, gamma).

    U_{k,n} = (alpha+1)_k (beta+1)_{n-k} (1-x-y)^{-gamma}
              F2(-gamma-n; alpha+1+k, beta+1+n-k; alpha+1, beta+1; x, y).

    method "terminating" expands this exactly as a polynomial,

        (alpha+1)_k (beta+1)_{n-k} sum_{i<=k, j<=n-k} (-gamma-n)_{i+j} (-k)_i (k-n)_j
            / ((alpha+1)_i (beta+1)_j i! j!) (-x)^i (-y)^j (1-x-y)^{n-i-j},

    method "f2" sums the F2 series numerically.
    """
    _check_index(k, n)
    w = _weight(w)
    a, b, g = w.as_tuple()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_simplex(x, y)
    pre = pochhammer(a + 1.0, k) * pochhammer(b + 1.0, n - k)
    if method == "f2":
        from .hyp2var import f2
        flat = [f2(-g - n, a + 1 + k, b + 1 + n - k, a + 1, b + 1, xi, yi).value
                for xi, yi in zip(np.ravel(x), np.ravel(y))]
        vals = np.reshape(flat, np.broadcast(x, y).shape)
        return pre * (1.0 - x - y) ** (-g) * vals
    if method != "terminating":
        raise ParameterError(f"unknown method {method!r}")
    z = 1.0 - x - y
    total = np.zeros(np.broadcast(x, y).shape)
    for i in range(k + 1):
        for j in range(n - k + 1):
            c = (pochhammer(-g - n, i + j) * pochhammer(-k, i) * pochhammer(k - n, j)
                 / (pochhammer(a + 1.0, i) * pochhammer(b + 1.0, j)
                    * math.factorial(i) * math.factorial(j)))
            total = total + c * (-x) ** i * (-y) ** j * z ** (n - i - j)
    return pre * total


def v_poly(m, n, w, x, y):
    """V_{m,n}(x, y): the monic-leading polynomial x^m y^n + lower degree,

        sum_{i<=m, j<=n} (-1)^{m+n+i+j} C(m,i) C(n,j) (alpha+1)_m (beta+1)_n
            (s)_{m+n+i+j} / ((alpha+1)_i (beta+1)_j (s)_{2m+2n}) x^i y^j

    with s = alpha + beta + gamma + 2.
    """
    if m < 0 or n < 0:
        raise ParameterError("V indices must be non-negative")
    if m + n > DEGREE_WARN:
        warnings.warn(f"degree {m + n} exceeds {DEGREE_WARN}; expect loss of accuracy", stacklevel=2)
    w = _weight(w)
    a, b, g = w.as_tuple()
    s = a + b + g + 2.0
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    lead = pochhammer(a + 1.0, m) * pochhammer(b + 1.0, n) / pochhammer(s, 2 * m + 2 * n)
    for i in range(m + 1):
        for j in range(n + 1):
            c = ((-1) ** (m + n + i + j) * math.comb(m, i) * math.comb(n, j)
                 * pochhammer(s, m + n + i + j)
                 / (pochhammer(a + 1.0, i) * pochhammer(b + 1.0, j)))
            total = total + c * x ** i * y ** j
    return lead * total


def v_poly_f2(m, n, w, x, y):
    """V_{m,n} through the terminating F2 with upper parameters -m, -n.

    V = (-1)^{m+n} (alpha+1)_m (beta+1)_n (s)_{m+n} / (s)_{2m+2n}
        F2(s+m+n; -m, -n; alpha+1, beta+1; x, y),  s = alpha+beta+gamma+2.
    """
    from .hyp2var import f2
    w = _weight(w)
    a, b, g = w.as_tuple()
    s = a + b + g + 2.0
    lead = ((-1) ** (m + n) * pochhammer(a + 1.0, m) * pochhammer(b + 1.0, n)
            * pochhammer(s, m + n) / pochhammer(s, 2 * m + 2 * n))
    return lead * f2(s + m + n, -m, -n, a + 1.0, b + 1.0, x, y, method="series").value


def biortho_constant(k, n, w):
    """<U_{k,n}, V_{k,n-k}> under the normalized weight:

    (-1)^n (alpha+1)_k (beta+1)_{n-k} (gamma+1)_n k! (n-k)! / (alpha+beta+gamma+3)_{2n}.
    """
    if not (0 <= k <= n):
        raise ParameterError(f"need 0 <= k <= n, got k={k}, n={n}")
    a, b, g = _weight(w).as_tuple()
    return ((-1) ** n * pochhammer(a + 1.0, k) * pochhammer(b + 1.0, n - k)
            * pochhammer(g + 1.0, n) * math.factorial(k) * math.factorial(n - k)
            / pochhammer(a + b + g + 3.0, 2 * n))


def pair_indices(n_max):
    """(n, k) pairs with 0 <= k <= n <= n_max, in the row order of pairing_matrix."""
    return [(n, k) for n in range(n_max + 1) for k in range(n + 1)]


def pairing_matrix(n_max, m_max, w, n_nodes=None):
    """Gram matrix <U_{k,n}, V_{j,m-j}> by quadrature.

    Rows follow pair_indices(n_max) as (n, k), columns pair_indices(m_max)
    as (m, j).
    """
    if n_max > 6 or m_max > 6:
        raise ParameterError("pairing_matrix is limited to degrees <= 6")
    w = _weight(w)
    if n_nodes is None:
        n_nodes = n_max + m_max + 8
    rows = pair_indices(n_max)
    cols = pair_indices(m_max)
    out = np.empty((len(rows), len(cols)))
    for r, (n, k) in enumerate(rows):
        for c, (m, j) in enumerate(cols):
            out[r, c] = integrate_triangle(
                lambda x, y: u_poly(k, n, w, x, y) * v_poly(j, m - j, w, x, y),
                w.as_tuple(), n_nodes)
    return out
