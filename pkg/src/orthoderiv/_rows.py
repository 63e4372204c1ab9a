"""Row-wise summation of double series whose rows are Gauss functions.

Two families are covered, both vectorized over arrays of evaluation points:

    sum_k coef_k o^k 2F1(a + s*k, b; c; z),  s = +1 or -1   (row_sum_a)
    sum_k coef_k o^k 2F1(a, b; c0 + k; z)                    (row_sum_c)

The 2F1 values along a row are generated by three-term contiguous recurrences
run in their stable direction, seeded by directly computed values. The row
coefficients follow coef_{k+1}/coef_k = prod(num+k) / (prod(den+k) (k+1)).
"""

from math import comb

import numpy as np

from .errors import ConvergenceError, PoleError
from .scalar_special import hyp2f1_array, is_nonpos_int

_BIG = 1e150
_CHUNK = 4_000_000


def _ratio(num, den, k):
    top = 1.0
    for p in num:
        top *= p + k
    bot = float(k + 1)
    for q in den:
        bot *= q + k
    return top, bot


def _terminates(num):
    tops = [int(-p) for p in num if is_nonpos_int(p)]
    return min(tops) if tops else None


def row_sum_a(num, den, o, a, step, b, c, z, tol, max_rows=2_000_000, fixed_rows=None):
    """sum_k coef_k o^k 2F1(a + step*k, b; c; z) with forward recurrence.

    The forward direction is the stable one for F2-type rows (step=+1, z<1)
    and H2-type rows (step=-1, z<1). With fixed_rows=K the first K+1 row
    terms are returned instead, as an array of shape (K+1,) + o.shape.
    """
    o = np.asarray(o, dtype=float)
    z = np.asarray(z, dtype=float)
    g_prev = hyp2f1_array(a, b, c, z)
    total = g_prev.copy()
    if o.size == 0:
        return total, 0, np.zeros_like(total)
    g_cur = hyp2f1_array(a + step, b, c, z)
    coef = np.ones_like(o)
    quiet = np.zeros(o.shape, dtype=int)
    active = o != 0.0
    last_term = np.zeros_like(o)
    stop = _terminates(num)
    # stored g values are the true ones divided by gscale
    gscale = np.ones_like(o)
    terms = [total.copy()] if fixed_rows is not None else None
    k = 0
    while active.any() or fixed_rows is not None:
        if fixed_rows is not None and k >= fixed_rows:
            return np.array(terms)
        if k >= max_rows:
            raise ConvergenceError("row summation did not converge")
        if stop is not None and k >= stop:
            if fixed_rows is not None:
                terms += [np.zeros_like(o)] * (fixed_rows - k)
                return np.array(terms)
            break
        top, bot = _ratio(num, den, k)
        if bot == 0.0:
            raise PoleError("row coefficient hits a denominator pole")
        coef = coef * (top / bot) * o
        k += 1
        if k >= 2:
            A = a + step * (k - 1)
            if step == 1:
                den_r = A * (z - 1.0)
                if A == 0.0:
                    g_new = hyp2f1_array(a + step * k, b, c, z) / gscale
                else:
                    g_new = -((c - A) * g_prev + (2 * A - c + (b - A) * z) * g_cur) / den_r
            else:
                if c - A == 0.0:
                    g_new = hyp2f1_array(a + step * k, b, c, z) / gscale
                else:
                    g_new = -((2 * A - c + (b - A) * z) * g_cur + A * (z - 1.0) * g_prev) / (c - A)
            g_prev, g_cur = g_cur, g_new
        term = coef * g_cur
        if terms is not None:
            terms.append(term)
        total = np.where(active, total + term, total)
        ratio = np.abs(term) / np.maximum(np.abs(last_term), 1e-300)
        ratio = np.minimum(ratio, 0.999999)
        tail = np.abs(term) / (1.0 - ratio)
        ok = tail <= tol * np.abs(total)
        quiet = np.where(ok, quiet + 1, 0)
        last_term = term
        active = active & (quiet < 3)
        # keep coef*g invariant while preventing overflow of g
        big = np.abs(g_cur) > _BIG
        if big.any():
            s = np.where(big, _BIG, 1.0)
            g_cur = g_cur / s
            g_prev = g_prev / s
            coef = coef * s
            # gscale only overflows once the true g is beyond float range, where
            # a fresh 2F1 evaluation could not be represented either
            with np.errstate(over="ignore"):
                gscale = gscale * s
    return total, k + 1, np.abs(last_term)


def _levin_u(partial, terms, n, k):
    j = np.arange(k + 1)
    idx = n + j
    w = (1.0 + idx) * terms[idx]
    c = (-1.0) ** j * np.array([comb(k, i) for i in j]) * ((1.0 + idx) / (1.0 + n + k)) ** (k - 1)
    return np.sum(c * partial[idx] / w) / np.sum(c / w)


def levin_sum(terms, starts=(10, 20, 40), orders=(4, 6, 8, 10)):
    """Limit of a slowly converging series from its leading terms, by the
    Levin u-transform. Returns (value, error estimate).

    Meant for rows at ratio one whose terms decay like a power of the index.
    Each start index n is combined with several orders k; the estimate whose
    neighbour in k agrees best is kept, and that disagreement is the error.
    Alternating rows reach full precision; rows of one sign typically stop
    near 1e-9 relative because of cancellation in the transform.
    """
    terms = np.asarray(terms, dtype=float)
    partial = np.cumsum(terms)
    best = (float(partial[-1]), np.inf)
    for n in starts:
        prev = None
        for k in orders:
            if n + k >= terms.size or np.any(terms[n:n + k + 1] == 0.0):
                break
            v = float(_levin_u(partial, terms, n, k))
            if prev is not None and abs(v - prev) < best[1]:
                best = (v, abs(v - prev))
            prev = v
    return best


def row_sum_c(num, den, o, a, b, c0, z, tol, max_rows=2_000_000):
    """sum_k coef_k o^k 2F1(a, b; c0 + k; z).

    The recurrence in c is run forward for z >= 0.8 and backward (seeded at
    the truncation index) for -1 <= z <= 1/2, the ranges where each direction
    was found to keep full accuracy over several hundred steps. Elsewhere each
    row's 2F1 is computed directly.
    """
    o = np.asarray(o, dtype=float)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(o)
    err = np.zeros_like(o)
    fwd = z >= 0.8
    bwd = (z >= -1.0) & (z <= 0.5)
    direct = ~(fwd | bwd)
    for mask, fn in ((fwd, _row_c_forward), (bwd, _row_c_backward), (direct, _row_c_direct)):
        if mask.any():
            out[mask], err[mask] = fn(num, den, o[mask], a, b, c0, z[mask], tol, max_rows)
    return out, err


def _row_c_direct(num, den, o, a, b, c0, z, tol, max_rows):
    total = hyp2f1_array(a, b, c0, z)
    coef = np.ones_like(o)
    quiet = np.zeros(o.shape, dtype=int)
    active = o != 0.0
    last_term = np.zeros_like(o)
    stop = _terminates(num)
    k = 0
    while active.any():
        if k >= max_rows:
            raise ConvergenceError("row summation did not converge")
        if stop is not None and k >= stop:
            break
        top, bot = _ratio(num, den, k)
        if bot == 0.0:
            raise PoleError("row coefficient hits a denominator pole")
        coef = coef * (top / bot) * o
        k += 1
        g = np.zeros_like(o)
        g[active] = hyp2f1_array(a, b, c0 + k, z[active])
        term = coef * g
        total = np.where(active, total + term, total)
        ratio = np.minimum(np.abs(term) / np.maximum(np.abs(last_term), 1e-300), 0.999999)
        ok = np.abs(term) / (1.0 - ratio) <= tol * np.abs(total)
        quiet = np.where(ok, quiet + 1, 0)
        last_term = term
        active = active & (quiet < 3)
    return total, np.abs(last_term)


def _row_c_forward(num, den, o, a, b, c0, z, tol, max_rows):
    g_prev = hyp2f1_array(a, b, c0, z)
    total = g_prev.copy()
    g_cur = hyp2f1_array(a, b, c0 + 1, z)
    coef = np.ones_like(o)
    quiet = np.zeros(o.shape, dtype=int)
    active = o != 0.0
    last_term = np.zeros_like(o)
    stop = _terminates(num)
    k = 0
    while active.any():
        if k >= max_rows:
            raise ConvergenceError("row summation did not converge")
        if stop is not None and k >= stop:
            break
        top, bot = _ratio(num, den, k)
        if bot == 0.0:
            raise PoleError("row coefficient hits a denominator pole")
        coef = coef * (top / bot) * o
        k += 1
        if k >= 2:
            C = c0 + k - 1
            d = (C - a) * (C - b)
            if d == 0.0:
                g_new = hyp2f1_array(a, b, c0 + k, z)
            else:
                g_new = -(C * (C - 1) * (z - 1.0) * g_prev
                          + C * (C - 1 - (2 * C - a - b - 1) * z) * g_cur) / (d * z)
            g_prev, g_cur = g_cur, g_new
        term = coef * g_cur
        total = np.where(active, total + term, total)
        ratio = np.minimum(np.abs(term) / np.maximum(np.abs(last_term), 1e-300), 0.999999)
        ok = np.abs(term) / (1.0 - ratio) <= tol * np.abs(total)
        quiet = np.where(ok, quiet + 1, 0)
        last_term = term
        active = active & (quiet < 3)
    return total, np.abs(last_term)


def _rows_needed(num, den, o, tol, max_rows):
    """Truncation index from the decay of the row coefficients alone."""
    coef = np.ones_like(o)
    peak = np.ones_like(o)
    quiet = np.zeros(o.shape, dtype=int)
    active = o != 0.0
    stop = _terminates(num)
    k = 0
    while active.any():
        if k >= max_rows:
            raise ConvergenceError("row summation did not converge")
        if stop is not None and k >= stop:
            return stop
        top, bot = _ratio(num, den, k)
        if bot == 0.0:
            raise PoleError("row coefficient hits a denominator pole")
        new = coef * (top / bot) * o
        k += 1
        peak = np.maximum(peak, np.abs(new))
        shrinking = np.abs(new) <= np.abs(coef)
        ok = shrinking & (np.abs(new) <= 1e-3 * tol * peak)
        quiet = np.where(ok, quiet + 1, 0)
        coef = new
        active = active & (quiet < 3)
    return k + 8


def _row_c_backward(num, den, o, a, b, c0, z, tol, max_rows):
    K = _rows_needed(num, den, o, tol, max_rows)
    n_pts = o.size
    out = np.empty(n_pts)
    err = np.empty(n_pts)
    step = max(1, _CHUNK // (K + 2))
    for lo in range(0, n_pts, step):
        hi = min(n_pts, lo + step)
        oo, zz = o[lo:hi], z[lo:hi]
        coefs = np.empty((K + 1, hi - lo))
        coefs[0] = 1.0
        for k in range(K):
            top, bot = _ratio(num, den, k)
            coefs[k + 1] = coefs[k] * (top / bot) * oo
        g_next = hyp2f1_array(a, b, c0 + K + 1, zz)
        g_k = hyp2f1_array(a, b, c0 + K, zz)
        total = coefs[K] * g_k
        tail = np.abs(total)
        for k in range(K, 0, -1):
            C = c0 + k
            d = C * (C - 1) * (zz - 1.0)
            if C == 0.0 or C == 1.0:
                g_prev = hyp2f1_array(a, b, c0 + k - 1, zz)
            else:
                g_prev = -(C * (C - 1 - (2 * C - a - b - 1) * zz) * g_k
                           + (C - a) * (C - b) * zz * g_next) / d
            g_next, g_k = g_k, g_prev
            total = total + coefs[k - 1] * g_k
        out[lo:hi] = total
        err[lo:hi] = tail
    return out, err


def rows_converge_ratio(x, y):
    """Geometric ratio of F2 rows sum_i x^i 2F1(.; y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.where(y > 0, np.abs(x) / np.maximum(1.0 - y, 1e-300), np.abs(x))
