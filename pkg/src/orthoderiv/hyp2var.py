"""Two-variable hypergeometric functions for real arguments.

Covered: the Appell functions F1, F2, F3, an extended F3 with one extra
Pochhammer ratio, the Horn function H2, and Olsson's F_P, F_Q and F_PR.

Each scalar function returns a SeriesValue. The `*_array` variants evaluate
many points at once by summing rows of Gauss functions; they are what the
kernel module uses on quadrature grids.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._rows import row_sum_a, row_sum_c
from ._series import HornSeries
from .errors import ParameterError, RegionError
from .quad_oracle import DEFAULT_NODES, product_unit_integral
from .scalar_special import SeriesValue, gamma_ratio, hyp3f2_unit
from .settings import REGION_MARGIN, resolve_tol

ARITY = {"F1": 4, "F2": 5, "F3": 5, "F3ext": 7, "H2": 5, "FP": 5, "FQ": 5, "FPR": 5}

# below this geometric ratio the plain double series is used
_SERIES_RATIO = 0.9


class Region(str, Enum):
    INSIDE_SERIES = "inside_series"
    INSIDE_CONTINUATION = "inside_continuation"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Hyp2Params:
    """A function kind, its parameters in signature order, and the point."""

    function_kind: str
    params: tuple
    x: float
    y: float

    def __post_init__(self):
        if self.function_kind not in ARITY:
            raise ParameterError(f"unknown function kind {self.function_kind!r}")
        if len(self.params) != ARITY[self.function_kind]:
            raise ParameterError(
                f"{self.function_kind} takes {ARITY[self.function_kind]} parameters, "
                f"got {len(self.params)}")


# ------------------------------------------------------------------ regions

def _lt(a, b):
    return a < b - REGION_MARGIN


def _series_test(kind, x, y):
    ax, ay = abs(x), abs(y)
    if kind == "F2":
        return _lt(ax + ay, 1.0)
    if kind in ("F1", "F3", "F3ext"):
        return _lt(ax, 1.0) and _lt(ay, 1.0)
    if kind == "H2":
        return _lt(ax, 1.0) and _lt(ay * (1.0 + ax), 1.0)
    if kind == "FP":
        return _lt(ax, 1.0) and _lt(abs(y - 1.0), 1.0)
    if kind == "FQ":
        return _lt(abs(y - 1.0), ay) and _lt(abs(y - 1.0) + ay, ax)
    if kind == "FPR":
        return _lt(abs(x - 1.0) + abs(y - 1.0), 1.0)
    raise ParameterError(f"unknown function kind {kind!r}")


def _continuation_test(kind, x, y):
    if kind == "F2":
        return _lt(x, 1.0) and _lt(y, 1.0) and _lt(x + y, 1.0)
    if kind in ("F3", "F3ext"):
        return _lt(x, 1.0) and _lt(y, 1.0)
    if kind == "H2":
        return (x < 0 and _lt((x - 1.0) * y, 1.0)) or (0 <= x and _lt(x, 1.0) and _lt(-1.0, y))
    if kind == "FP":
        return _lt(x, 1.0) and _lt(0.0, y)
    return _series_test(kind, x, y)


def convergence_region(kind, x, y):
    """Classify (x, y) for the given function kind."""
    if _series_test(kind, x, y):
        return Region.INSIDE_SERIES
    if _continuation_test(kind, x, y):
        return Region.INSIDE_CONTINUATION
    return Region.OUTSIDE


def _require(kind, x, y, series_only=False):
    reg = convergence_region(kind, x, y)
    if reg is Region.OUTSIDE or (series_only and reg is not Region.INSIDE_SERIES):
        raise RegionError(f"{kind} is not defined by this evaluator at ({x}, {y})")
    return reg


def _from_rows(value, rows, err, tol):
    value = float(value)
    err = float(err)
    return SeriesValue(value, int(rows), err, err <= tol * abs(value))


def _scaled(sv, factor):
    return SeriesValue(factor * sv.value, sv.terms_used, abs(factor) * sv.err_estimate, sv.converged)


# ----------------------------------------------------------------------- F1

def f1(a, b1, b2, c, x, y, tol=None):
    """Appell F1: sum (a)_{i+j} (b1)_i (b2)_j / (c)_{i+j} x^i y^j / (i! j!)."""
    tol = resolve_tol(tol)
    _require("F1", x, y, series_only=True)
    hs = HornSeries([(a, "i+j", 1), (b1, "i", 1), (b2, "j", 1), (c, "i+j", -1)])
    return hs.sum(x, y, tol)


# ----------------------------------------------------------------------- F2

def _f2_series(a, b1, b2, c1, c2, x, y, tol):
    hs = HornSeries([(a, "i+j", 1), (b1, "i", 1), (b2, "j", 1), (c1, "i", -1), (c2, "j", -1)])
    return hs.sum(x, y, tol)


def _f2_transform(name, a, b1, b2, c1, c2, x, y):
    """(prefactor, parameters, new point) of an Euler-type F2 transformation."""
    if name == "euler1":
        return (1.0 - x) ** (-a), (a, c1 - b1, b2, c1, c2), (x / (x - 1.0), y / (1.0 - x))
    if name == "euler2":
        return (1.0 - y) ** (-a), (a, b1, c2 - b2, c1, c2), (x / (1.0 - y), y / (y - 1.0))
    if name == "euler3":
        w = x + y - 1.0
        return (-w) ** (-a), (a, c1 - b1, c2 - b2, c1, c2), (x / w, y / w)
    raise ParameterError(f"unknown F2 method {name!r}")


def _rows_ratio_f2(x, y):
    return abs(x) / (1.0 - y) if y > 0 else abs(x)


def f2(a, b1, b2, c1, c2, x, y, tol=None, method="auto"):
    """Appell F2: sum (a)_{i+j} (b1)_i (b2)_j / ((c1)_i (c2)_j) x^i y^j / (i! j!).

    Defined on x<1, y<1, x+y<1. method: "auto", "series", "euler1",
    "euler2", "euler3" or "rows".
    """
    tol = resolve_tol(tol)
    reg = _require("F2", x, y)
    if method == "series":
        if reg is not Region.INSIDE_SERIES:
            raise RegionError(f"F2 series diverges at ({x}, {y})")
        return _f2_series(a, b1, b2, c1, c2, x, y, tol)
    if method == "rows":
        return _f2_rows_scalar(a, b1, b2, c1, c2, x, y, tol)
    if method.startswith("euler"):
        pre, p, (u, v) = _f2_transform(method, a, b1, b2, c1, c2, x, y)
        if not _lt(abs(u) + abs(v), 1.0):
            raise RegionError(f"F2 transformation {method} does not converge at ({x}, {y})")
        return _scaled(_f2_series(*p, u, v, tol), pre)
    if method != "auto":
        raise ParameterError(f"unknown F2 method {method!r}")

    if abs(x) + abs(y) <= _SERIES_RATIO:
        return _f2_series(a, b1, b2, c1, c2, x, y, tol)
    best, best_rho = None, math.inf
    for name in ("euler1", "euler2", "euler3"):
        _, _, (u, v) = _f2_transform(name, a, b1, b2, c1, c2, x, y)
        rho = abs(u) + abs(v)
        if rho < best_rho:
            best, best_rho = name, rho
    if best_rho <= _SERIES_RATIO:
        return f2(a, b1, b2, c1, c2, x, y, tol, method=best)
    if min(_rows_ratio_f2(x, y), _rows_ratio_f2(y, x)) < 1.0:
        return _f2_rows_scalar(a, b1, b2, c1, c2, x, y, tol)
    return f2(a, b1, b2, c1, c2, x, y, tol, method=best)


def _f2_rows_scalar(a, b1, b2, c1, c2, x, y, tol):
    if _rows_ratio_f2(y, x) < _rows_ratio_f2(x, y):
        a, b1, b2, c1, c2, x, y = a, b2, b1, c2, c1, y, x
    if _rows_ratio_f2(x, y) >= 1.0:
        raise RegionError(f"F2 row expansion diverges at ({x}, {y})")
    v, rows, err = row_sum_a([a, b1], [c1], np.array([x]), a, 1, b2, c2, np.array([y]), tol * 1e-2)
    return _from_rows(v[0], rows, err[0], tol)


def f2_array(a, b1, b2, c1, c2, x, y, tol=None):
    """F2 on arrays of points, by row expansion in the better-converging variable."""
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    xf, yf = x.ravel(), y.ravel()
    ok = (xf < 1) & (yf < 1) & (xf + yf < 1)
    if not ok.all():
        raise RegionError("F2 evaluated outside x<1, y<1, x+y<1")
    rx = np.where(yf > 0, np.abs(xf) / (1.0 - yf), np.abs(xf))
    ry = np.where(xf > 0, np.abs(yf) / (1.0 - xf), np.abs(yf))
    out = np.empty_like(xf)
    use_x = (rx <= ry) & (rx < 0.995)
    use_y = ~use_x & (ry < 0.995)
    inner_tol = tol * 1e-2
    if use_x.any():
        out[use_x] = row_sum_a([a, b1], [c1], xf[use_x], a, 1, b2, c2, yf[use_x], inner_tol)[0]
    if use_y.any():
        out[use_y] = row_sum_a([a, b2], [c2], yf[use_y], a, 1, b1, c1, xf[use_y], inner_tol)[0]
    for k in np.flatnonzero(~(use_x | use_y)):
        out[k] = f2(a, b1, b2, c1, c2, xf[k], yf[k], tol).value
    return out.reshape(x.shape)


# ----------------------------------------------------------------------- F3

def _f3_series(a1, a2, b1, b2, c, x, y, tol, d1=None, d2=None):
    factors = [(a1, "i", 1), (a2, "j", 1), (b1, "i", 1), (b2, "j", 1), (c, "i+j", -1)]
    if d1 is not None:
        factors += [(d1, "i", 1), (d2, "i", -1)]
    return HornSeries(factors).sum(x, y, tol)


def _f3_integral(a1, a2, b1, b2, c, x, y, n_nodes):
    if min(a1, a2, c - a1 - a2, c - a2) <= 0:
        raise ParameterError("F3 integral representation needs a1, a2, c-a1-a2, c-a2 > 0")

    def g(u, v):
        return (1.0 - y * v) ** (-b2) * (1.0 - x * u * (1.0 - v)) ** (-b1)

    exps = [(a1 - 1.0, c - a1 - a2 - 1.0), (a2 - 1.0, c - a2 - 1.0)]
    val = product_unit_integral(g, exps, n_nodes)
    return val * gamma_ratio([c], [a1, a2, c - a1 - a2])


def _f3_power_axis(a1, a2, b1, b2, c, x, y):
    """Outer axis whose row coefficients decay fast enough to sum near ratio one.

    Row k of the x-expansion scales like k^(a1+b1-c-1) x^k, so with
    a1+b1-c < -2 the rows still converge quickly as x -> 1. An axis only
    qualifies when its argument satisfies |arg| <= 1.
    """
    cands = [(a1 + b1 - c, "x", x), (a2 + b2 - c, "y", y)]
    cands = [(p, ax) for p, ax, v in cands if p < -2.0 and abs(v) <= 1.0]
    if not cands:
        return None
    return min(cands)[1]


def f3(a1, a2, b1, b2, c, x, y, tol=None, method="auto", n_nodes=DEFAULT_NODES):
    """Appell F3: sum (a1)_i (a2)_j (b1)_i (b2)_j / (c)_{i+j} x^i y^j / (i! j!).

    Defined on x<1, y<1. method: "auto", "series", "rows" or "integral".
    """
    tol = resolve_tol(tol)
    reg = _require("F3", x, y)
    if method == "auto":
        if max(abs(x), abs(y)) <= _SERIES_RATIO:
            method = "series"
        elif min(abs(x), abs(y)) < 0.995:
            method = "rows"
        elif _f3_power_axis(a1, a2, b1, b2, c, x, y) is not None:
            axis = _f3_power_axis(a1, a2, b1, b2, c, x, y)
            if axis == "y":
                a1, a2, b1, b2, x, y = a2, a1, b2, b1, y, x
            v, err = row_sum_c([a1, b1], [c], np.array([x]), a2, b2, c, np.array([y]), tol * 1e-2)
            return _from_rows(v[0], 0, err[0], tol)
        else:
            method = "integral"
    if method == "series":
        if reg is not Region.INSIDE_SERIES:
            raise RegionError(f"F3 series diverges at ({x}, {y})")
        return _f3_series(a1, a2, b1, b2, c, x, y, tol)
    if method == "rows":
        if abs(y) < abs(x):
            a1, a2, b1, b2, x, y = a2, a1, b2, b1, y, x
        if not _lt(abs(x), 1.0):
            raise RegionError(f"F3 row expansion diverges at ({x}, {y})")
        v, err = row_sum_c([a1, b1], [c], np.array([x]), a2, b2, c, np.array([y]), tol * 1e-2)
        return _from_rows(v[0], 0, err[0], tol)
    if method == "integral":
        val = _f3_integral(a1, a2, b1, b2, c, x, y, n_nodes)
        coarse = _f3_integral(a1, a2, b1, b2, c, x, y, max(8, n_nodes // 2))
        err = abs(val - coarse)
        return SeriesValue(val, n_nodes * n_nodes, err, err <= tol * abs(val))
    raise ParameterError(f"unknown F3 method {method!r}")


def f3_array(a1, a2, b1, b2, c, x, y, tol=None):
    """F3 on arrays of points with x<1, y<1, using row expansions."""
    tol = resolve_tol(tol)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    xf, yf = x.ravel(), y.ravel()
    if not ((xf < 1) & (yf < 1)).all():
        raise RegionError("F3 evaluated outside x<1, y<1")
    out = np.empty_like(xf)
    outer_x = np.abs(xf) <= np.abs(yf)
    bad = np.minimum(np.abs(xf), np.abs(yf)) >= 0.995
    inner_tol = tol * 1e-2
    m = outer_x & ~bad
    if m.any():
        out[m] = row_sum_c([a1, b1], [c], xf[m], a2, b2, c, yf[m], inner_tol)[0]
    m = ~outer_x & ~bad
    if m.any():
        out[m] = row_sum_c([a2, b2], [c], yf[m], a1, b1, c, xf[m], inner_tol)[0]
    axes = np.array([_f3_power_axis(a1, a2, b1, b2, c, u, v) for u, v in zip(xf[bad], yf[bad])],
                    dtype=object)
    idx = np.flatnonzero(bad)
    m = idx[axes == "x"]
    if m.size:
        out[m] = row_sum_c([a1, b1], [c], xf[m], a2, b2, c, yf[m], inner_tol)[0]
    m = idx[axes == "y"]
    if m.size:
        out[m] = row_sum_c([a2, b2], [c], yf[m], a1, b1, c, xf[m], inner_tol)[0]
    for k in idx[[ax is None for ax in axes]]:
        out[k] = f3(a1, a2, b1, b2, c, xf[k], yf[k], tol).value
    return out.reshape(x.shape)


def f3_extended(a1, a2, b1, b2, c, d1, d2, x, y, tol=None, method="auto",
                n_nodes=DEFAULT_NODES):
    """F3 with the extra factor (d1)_i / (d2)_i in the i-index.

    method: "auto" (series, or rows in x for |x|<1), "series", "rows", or
    "integral". The triple-integral route is experimental.
    """
    tol = resolve_tol(tol)
    reg = _require("F3ext", x, y)
    if method == "auto":
        method = "series" if max(abs(x), abs(y)) <= _SERIES_RATIO else "rows"
    if method == "series":
        if reg is not Region.INSIDE_SERIES:
            raise RegionError(f"extended F3 series diverges at ({x}, {y})")
        return _f3_series(a1, a2, b1, b2, c, x, y, tol, d1, d2)
    if method == "rows":
        if not _lt(abs(x), 1.0):
            raise RegionError(f"extended F3 row expansion needs |x|<1, got {x}")
        v, err = row_sum_c([a1, b1, d1], [c, d2], np.array([x]), a2, b2, c, np.array([y]), tol * 1e-2)
        return _from_rows(v[0], 0, err[0], tol)
    if method == "integral":
        val = _f3ext_integral(a1, a2, b1, b2, c, d1, d2, x, y, n_nodes)
        coarse = _f3ext_integral(a1, a2, b1, b2, c, d1, d2, x, y, max(8, n_nodes // 2))
        err = abs(val - coarse)
        return SeriesValue(val, n_nodes ** 3, err, err <= tol * abs(val))
    raise ParameterError(f"unknown extended F3 method {method!r}")


def f3ext_array(a1, a2, b1, b2, c, d1, d2, x, y, tol=None):
    """Extended F3 on arrays with |x|<1, y<1, by rows in x."""
    tol = resolve_tol(tol)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not ((np.abs(x) < 1) & (y < 1)).all():
        raise RegionError("extended F3 rows need |x|<1, y<1")
    out, _ = row_sum_c([a1, b1, d1], [c, d2], x.ravel(), a2, b2, c, y.ravel(), tol * 1e-2)
    return out.reshape(x.shape)


def _f3ext_integral(a1, a2, b1, b2, c, d1, d2, x, y, n_nodes):
    if not (a1 > 0 and a2 > 0 and c - a1 - a2 > 0 and d1 > 0 and d2 > d1):
        raise ParameterError(
            "extended F3 integral needs a1, a2, c-a1-a2, d1, d2-d1 > 0")

    def g(u, v, w):
        return (1.0 - y * v * (1.0 - u)) ** (-b2) * (1.0 - x * u * w) ** (-b1)

    exps = [(a1 - 1.0, c - a1 - 1.0), (a2 - 1.0, c - a1 - a2 - 1.0), (d1 - 1.0, d2 - d1 - 1.0)]
    val = product_unit_integral(g, exps, n_nodes)
    return val * gamma_ratio([c, d2], [a1, a2, c - a1 - a2, d1, d2 - d1])


# ----------------------------------------------------------------------- H2

def h2(a, b1, b2, c1, c2, x, y, tol=None, method="auto"):
    """Horn H2: sum (a)_{i-j} (b1)_i (b2)_j (c1)_j / (c2)_i x^i y^j / (i! j!).

    The series is used inside its Horn region; elsewhere in the
    continuation region the sum over j of 2F1(a-j, b1; c2; x) rows is used,
    which needs |y|<1 for 0<=x<1 and |y|(1-x)<1 for x<0.
    """
    tol = resolve_tol(tol)
    reg = _require("H2", x, y)
    if method == "auto":
        rho = max(abs(x), abs(y) * (1.0 + abs(x)))
        method = "series" if rho <= _SERIES_RATIO else "rows"
    if method == "series":
        if reg is not Region.INSIDE_SERIES:
            raise RegionError(f"H2 series diverges at ({x}, {y})")
        hs = HornSeries([(a, "i-j", 1), (b1, "i", 1), (b2, "j", 1), (c1, "j", 1), (c2, "i", -1)])
        return hs.sum(x, y, tol)
    if method == "rows":
        if not _h2_rows_ok(x, y):
            raise RegionError(f"no H2 representation implemented at ({x}, {y})")
        v, rows, err = row_sum_a([b2, c1], [1.0 - a], np.array([-y]), a, -1, b1, c2,
                                 np.array([x]), tol * 1e-2)
        return _from_rows(v[0], rows, err[0], tol)
    raise ParameterError(f"unknown H2 method {method!r}")


def _h2_rows_ok(x, y):
    if x < 0:
        return _lt(abs(y) * (1.0 - x), 1.0)
    return _lt(x, 1.0) and _lt(abs(y), 1.0)


def h2_array(a, b1, b2, c1, c2, x, y, tol=None):
    """H2 on arrays of points by rows in y."""
    tol = resolve_tol(tol)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    xf, yf = x.ravel(), y.ravel()
    ok = np.where(xf < 0, np.abs(yf) * (1.0 - xf) < 1, (xf < 1) & (np.abs(yf) < 1))
    if not ok.all():
        raise RegionError("H2 row expansion diverges for some points")
    out = row_sum_a([b2, c1], [1.0 - a], -yf, a, -1, b1, c2, xf, tol * 1e-2)[0]
    return out.reshape(x.shape)


# ----------------------------------------------------------------------- F_P

def _fp_series(a, b1, b2, c1, c2, x, y, tol):
    hs = HornSeries([(a, "i+j", 1), (a - c2 + 1.0, "i", 1), (b2, "j", 1), (b1, "i", 1),
                     (a + b2 - c2 + 1.0, "i+j", -1), (c1, "i", -1)])
    return hs.sum(x, 1.0 - y, tol)


def _fp_inverted(a, b1, b2, c1, c2, x, y, tol):
    hs = HornSeries([(a, "i+j", 1), (a - c2 + 1.0, "i+j", 1), (b1, "i", 1),
                     (a + b2 - c2 + 1.0, "i+j", -1), (c1, "i", -1)])
    return _scaled(hs.sum(x / y, (y - 1.0) / y, tol), y ** (-a))


def _fp_rows(a, b1, b2, c1, c2, x, y, tol):
    c0 = a + b2 - c2 + 1.0
    z = (y - 1.0) / y
    v, err = row_sum_c([a, a - c2 + 1.0, b1], [c0, c1], x, b2 - c2 + 1.0, b2, c0, z, tol)
    pre = y ** (-b2)
    return pre * v, np.abs(pre) * err


def fp(a, b1, b2, c1, c2, x, y, tol=None, method="auto"):
    """Olsson's F_P as a double series in x and 1-y.

    F_P = sum (a)_{i+j} (a-c2+1)_i (b2)_j (b1)_i
          / ((a+b2-c2+1)_{i+j} (c1)_i) x^i (1-y)^j / (i! j!).

    Defined on x<1, y>0. method: "auto", "series", "rows" (|x|<1, any y>0),
    "inverted" (series in x/y and 1-1/y) or "decomposition" (regular part
    plus explicit singular term, near (1,1)).
    """
    tol = resolve_tol(tol)
    reg = _require("FP", x, y)
    if method == "auto":
        if reg is Region.INSIDE_SERIES and max(abs(x), abs(1.0 - y)) <= _SERIES_RATIO:
            method = "series"
        elif _lt(abs(x), 1.0):
            method = "rows"
        elif _lt(abs(x / y) + abs(1.0 - 1.0 / y), 1.0):
            method = "inverted"
        else:
            raise RegionError(f"no F_P representation implemented at ({x}, {y})")
    if method == "series":
        if reg is not Region.INSIDE_SERIES:
            raise RegionError(f"F_P series diverges at ({x}, {y})")
        return _fp_series(a, b1, b2, c1, c2, x, y, tol)
    if method == "rows":
        if not _lt(abs(x), 1.0):
            raise RegionError(f"F_P row expansion needs |x|<1, got {x}")
        v, err = _fp_rows(a, b1, b2, c1, c2, np.array([x]), np.array([y]), tol * 1e-2)
        return _from_rows(v[0], 0, err[0], tol)
    if method == "inverted":
        if not _lt(abs(x / y) + abs(1.0 - 1.0 / y), 1.0):
            raise RegionError(f"inverted F_P series diverges at ({x}, {y})")
        return _fp_inverted(a, b1, b2, c1, c2, x, y, tol)
    if method == "decomposition":
        reg_part, sing_part = fp_decomposition(a, b1, b2, c1, c2, x, y, tol)
        err = reg_part.err_estimate + sing_part.err_estimate
        val = reg_part.value + sing_part.value
        return SeriesValue(val, reg_part.terms_used + sing_part.terms_used, err,
                           reg_part.converged and sing_part.converged)
    raise ParameterError(f"unknown F_P method {method!r}")


def fp_array(a, b1, b2, c1, c2, x, y, tol=None):
    """F_P on arrays with |x|<1, y>0, by rows in x."""
    tol = resolve_tol(tol)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not ((np.abs(x) < 1) & (y > 0)).all():
        raise RegionError("F_P rows need |x|<1, y>0")
    v, _ = _fp_rows(a, b1, b2, c1, c2, x.ravel(), y.ravel(), tol * 1e-2)
    return v.reshape(x.shape)


def fp_decomposition(a, b1, b2, c1, c2, x, y, tol=None):
    """(regular part, singular part) of F_P near (1, 1).

    The regular part is fpr(); the singular part is an explicit power
    prefactor times an F3 in ((x-1)/x, (1-x)/y).
    """
    tol = resolve_tol(tol)
    regular = fpr(a, b1, b2, c1, c2, x, y, tol)
    coef = gamma_ratio([a + b2 - c2 + 1.0, a + b1 - c1 - b2, c1], [a, b1, a - c2 + 1.0])
    pre = coef * x ** (b1 - c1) * y ** (-b2) * (1.0 - x) ** (c1 - b1 + b2 - a)
    sing = f3(1.0 - b1, b2, c1 - b1, b2 - c2 + 1.0, c1 - b1 + b2 - a + 1.0,
              (x - 1.0) / x, (1.0 - x) / y, tol)
    return regular, _scaled(sing, pre)


# ----------------------------------------------------------------------- F_Q

def fq(a, b1, b2, c1, c2, x, y, tol=None):
    """Olsson's F_Q:

    x^{-b1} y^{b1-a} sum (b1+c2-b2-a)_{i-j} (b1)_i (b1-c1+1)_i
        / ((b1-a+1)_{i-j} (b1+c2-a)_{i-j}) (y/x)^i ((1-y)/y)^j / (i! j!)

    on |y-1| < |y|, |y-1| + |y| < |x|.
    """
    tol = resolve_tol(tol)
    _require("FQ", x, y, series_only=True)
    hs = HornSeries([(b1 + c2 - b2 - a, "i-j", 1), (b1, "i", 1), (b1 - c1 + 1.0, "i", 1),
                     (b1 - a + 1.0, "i-j", -1), (b1 + c2 - a, "i-j", -1)])
    pre = x ** (-b1) * y ** (b1 - a)
    return _scaled(hs.sum(y / x, (1.0 - y) / y, tol), pre)


# ---------------------------------------------------------------------- F_PR

def fpr(a, b1, b2, c1, c2, x, y, tol=None):
    """Part of F_P regular at (1, 1), as a double series in 1-x, 1-y whose
    coefficients contain a 3F2 at unit argument.

    Defined on |x-1| + |y-1| < 1; the inner 3F2 needs a > 0.
    """
    tol = resolve_tol(tol)
    _require("FPR", x, y, series_only=True)
    if not a > 0:
        raise ParameterError("F_PR needs a > 0 for the inner 3F2 at unit argument")
    u1 = b2 - c2 + 1.0
    l1 = c1 - b1 + b2 - c2 + 1.0
    l2 = c1 + b2 - a
    cache = {}

    def inner(i, j):
        key = (i, j)
        if key not in cache:
            cache[key] = hyp3f2_unit(u1, c1 - b1 + b2 - a - i, c1 - a - j, l1, l2, tol * 1e-2).value
        return cache[key]

    def extra(I, J):
        out = np.empty(I.shape)
        for idx, (i, j) in enumerate(zip(I.ravel(), J.ravel())):
            out.flat[idx] = inner(int(i), int(j))
        return out

    hs = HornSeries([(a - c2 + 1.0, "i", 1), (b1, "i", 1), (b2, "j", 1),
                     (a + b1 - c1 - b2 + 1.0, "i", -1)], extra=extra)
    coef = gamma_ratio([a + b2 - c2 + 1.0, c1 - b1 + b2 - a, c1], [a, l1, l2])
    return _scaled(hs.sum(1.0 - x, 1.0 - y, tol, start=4), coef)


# ------------------------------------------------------ continuation check

def f3_continuation(a0, b1, b2, c1, c2, x1, x2, tol=None):
    """Both sides of the F3 -> F_Q + F3 continuation identity.

    left  = F3(a0, b1; b2, c1; c2; x1, x2)
    right = G1 x1^{-b2} x2^{-c1} F_Q(b2+c1-c2+1, b2, c1, 1-a0+b2, c1-b1+1; 1/x1, 1/x2)
          + G2 x2^{1-c2} (1-x2)^{c2-b1-c1}
            F3(a0, 1-b1; b2, 1-c1; 1-b1-c1+c2; x1(x2-1)/x2, 1-x2)

    with G1 = Gamma(c2)Gamma(c2-b1-c1)/(Gamma(c2-b1)Gamma(c2-c1)) and
    G2 = Gamma(c2)Gamma(b1+c1-c2)/(Gamma(b1)Gamma(c1)). Needs x1 > 0, 0 < x2 < 1
    and x1 (2 - x2) < x2 for the F_Q series.
    """
    tol = resolve_tol(tol)
    if not (x1 > 0 and 0 < x2 < 1):
        raise RegionError("continuation identity needs x1 > 0 and 0 < x2 < 1")
    left = f3(a0, b1, b2, c1, c2, x1, x2, tol).value
    g1 = gamma_ratio([c2, c2 - b1 - c1], [c2 - b1, c2 - c1])
    g2 = gamma_ratio([c2, b1 + c1 - c2], [b1, c1])
    q = fq(b2 + c1 - c2 + 1.0, b2, c1, 1.0 - a0 + b2, c1 - b1 + 1.0, 1.0 / x1, 1.0 / x2, tol).value
    r = f3(a0, 1.0 - b1, b2, 1.0 - c1, 1.0 - b1 - c1 + c2, x1 * (x2 - 1.0) / x2, 1.0 - x2, tol).value
    right = g1 * x1 ** (-b2) * x2 ** (-c1) * q + g2 * x2 ** (1.0 - c2) * (1.0 - x2) ** (c2 - b1 - c1) * r
    return left, right


# -------------------------------------------------------------- PDE check

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0])


def f2_pde_residual(a0, b1, b2, c1, c2, solution, x, y, h=1e-3, domain=None):
    """Residuals of the F2 system of partial differential equations

        x(1-x) r - x y s + (c1 - (a0+b1+1) x) p - b1 y q - a0 b1 u = 0
        y(1-y) t - x y s + (c2 - (a0+b2+1) y) q - b2 x p - a0 b2 u = 0

    with p, q, r, s, t the first and second partial derivatives of
    `solution`, estimated on a 5x5 fourth-order central-difference stencil.
    """
    offs = np.arange(-2, 3)
    grid = np.empty((5, 5))
    for i, dx in enumerate(offs):
        for j, dy in enumerate(offs):
            px, py = x + dx * h, y + dy * h
            if domain is not None and not domain(px, py):
                raise RegionError(f"stencil point ({px}, {py}) is outside the domain")
            try:
                grid[i, j] = float(solution(px, py))
            except RegionError as exc:
                raise RegionError(f"stencil point ({px}, {py}) is outside the domain") from exc
    u = grid[2, 2]
    p = _D1 @ grid @ _D0 / h
    q = _D0 @ grid @ _D1 / h
    r = _D2 @ grid @ _D0 / h ** 2
    t = _D0 @ grid @ _D2 / h ** 2
    s = _D1 @ grid @ _D1 / h ** 2
    r1 = x * (1 - x) * r - x * y * s + (c1 - (a0 + b1 + 1) * x) * p - b1 * y * q - a0 * b1 * u
    r2 = y * (1 - y) * t - x * y * s + (c2 - (a0 + b2 + 1) * y) * q - b2 * x * p - a0 * b2 * u
    return float(r1), float(r2)


# ------------------------------------------------------------ dispatcher

_SCALAR = {"F1": f1, "F2": f2, "F3": f3, "F3ext": f3_extended, "H2": h2,
           "FP": fp, "FQ": fq, "FPR": fpr}


def evaluate(spec, tol=None):
    """Evaluate a Hyp2Params instance."""
    return _SCALAR[spec.function_kind](*spec.params, spec.x, spec.y, tol=tol)
