"""Generic summation of Horn-type double series.

A term is prod_f (p_f)_{idx_f}^{+-1} x^i y^j / (i! j!) times an optional extra
factor, where idx_f is one of i, j, i+j, i-j. Terms are built in log space so
that large Pochhammer products never overflow.
"""

import math

import numpy as np
from scipy.special import gammaln

from .errors import PoleError
from .scalar_special import SeriesValue, is_nonpos_int

_KINDS = ("i", "j", "i+j", "i-j")
_MAX_BLOCK = 2_000_000


def _poch_table(p, m_lo, m_hi):
    """log|(p)_m|, sign, zero flag and infinite flag for m = m_lo..m_hi."""
    m = np.arange(m_lo, m_hi + 1)
    logv = np.zeros(m.shape)
    sign = np.ones(m.shape)
    zero = np.zeros(m.shape, dtype=bool)
    inf = np.zeros(m.shape, dtype=bool)
    if m_hi > 0:
        f = p + np.arange(m_hi)
        fz = f == 0.0
        lf = np.log(np.abs(np.where(fz, 1.0, f)))
        cl = np.concatenate(([0.0], np.cumsum(lf)))
        cneg = np.concatenate(([0], np.cumsum(f < 0)))
        cz = np.concatenate(([0], np.cumsum(fz)))
        pos = m >= 0
        mp_ = m[pos]
        logv[pos] = cl[mp_]
        sign[pos] = np.where(cneg[mp_] % 2, -1.0, 1.0)
        zero[pos] = cz[mp_] > 0
    if m_lo < 0:
        q_max = -m_lo
        g = p - np.arange(1, q_max + 1)
        gz = g == 0.0
        lg = np.log(np.abs(np.where(gz, 1.0, g)))
        cl = np.concatenate(([0.0], np.cumsum(lg)))
        cneg = np.concatenate(([0], np.cumsum(g < 0)))
        cz = np.concatenate(([0], np.cumsum(gz)))
        neg = m < 0
        q = -m[neg]
        logv[neg] = -cl[q]
        sign[neg] = np.where(cneg[q] % 2, -1.0, 1.0)
        inf[neg] = cz[q] > 0
    return logv, sign, zero, inf


class HornSeries:
    """Double series sum_{i,j} A(i,j) x^i y^j with Pochhammer coefficients.

    factors: list of (param, kind, power) with kind in {"i","j","i+j","i-j"} and
    power +1 (numerator) or -1 (denominator). The 1/(i! j!) factor is implicit.
    extra: optional callable extra(I, J) -> array multiplying the terms.
    """

    def __init__(self, factors, extra=None):
        for p, kind, power in factors:
            if kind not in _KINDS or power not in (1, -1):
                raise ValueError(f"bad factor {(p, kind, power)}")
        self.factors = [(float(p), kind, power) for p, kind, power in factors]
        self.extra = extra

    def caps(self):
        """Index bounds (i_cap, j_cap, n_cap) implied by terminating numerators."""
        i_cap = j_cap = n_cap = math.inf
        for p, kind, power in self.factors:
            if power == 1 and is_nonpos_int(p):
                top = int(-p)
                if kind == "i":
                    i_cap = min(i_cap, top)
                elif kind == "j":
                    j_cap = min(j_cap, top)
                elif kind == "i+j":
                    n_cap = min(n_cap, top)
        i_cap = min(i_cap, n_cap)
        j_cap = min(j_cap, n_cap)
        return i_cap, j_cap, n_cap

    def block(self, i0, i1, j0, j1, x, y):
        """Terms for i in [i0,i1), j in [j0,j1), as a 2-D array."""
        I = np.arange(i0, i1)[:, None]
        J = np.arange(j0, j1)[None, :]
        logt = -gammaln(I + 1.0) - gammaln(J + 1.0)
        logt = logt + np.zeros((i1 - i0, j1 - j0))
        sign = np.ones_like(logt)
        vanish = np.zeros(logt.shape, dtype=bool)
        pole = np.zeros(logt.shape, dtype=bool)
        for p, kind, power in self.factors:
            if kind == "i":
                idx = I + 0 * J
            elif kind == "j":
                idx = J + 0 * I
            elif kind == "i+j":
                idx = I + J
            else:
                idx = I - J
            lo, hi = int(idx.min()), int(idx.max())
            lv, sg, zr, nf = _poch_table(p, min(lo, 0), max(hi, 0))
            k = idx - min(lo, 0)
            logt = logt + power * lv[k]
            sign = sign * sg[k]
            if power == 1:
                vanish |= zr[k]
                pole |= nf[k]
            else:
                vanish |= nf[k]
                pole |= zr[k]
        if x != 0.0:
            logt = logt + I * math.log(abs(x))
            if x < 0:
                sign = sign * np.where(I % 2, -1.0, 1.0)
        if y != 0.0:
            logt = logt + J * math.log(abs(y))
            if y < 0:
                sign = sign * np.where(J % 2, -1.0, 1.0)
        bad = pole & ~vanish
        if bad.any():
            raise PoleError("denominator Pochhammer symbol hits a pole")
        with np.errstate(over="ignore", under="ignore"):
            terms = np.where(vanish, 0.0, sign * np.exp(logt))
        if self.extra is not None:
            terms = terms * self.extra(I + 0 * J, J + 0 * I)
        return terms

    def sum(self, x, y, tol, max_terms=50_000_000, start=8):
        """Adaptive rectangular summation.

        The rectangle [0,I)x[0,J) grows in whichever direction still
        contributes; a direction is finished after two consecutive strips
        each contributing <= tol*|sum| with decaying edge terms.
        """
        x, y = float(x), float(y)
        i_cap, j_cap, _ = self.caps()
        i_cap = 1 if x == 0.0 else i_cap + 1
        j_cap = 1 if y == 0.0 else j_cap + 1
        I = int(min(start, i_cap))
        J = int(min(start, j_cap))
        first = self.block(0, I, 0, J, x, y)
        total = math.fsum(first.ravel())
        quiet = {"i": 0, "j": 0}
        last = {"i": np.abs(first[-1, :]).sum(), "j": np.abs(first[:, -1]).sum()}
        edge = {"i": np.abs(first[-1, :]).max(), "j": np.abs(first[:, -1]).max()}
        used = I * J
        err = {"i": last["i"], "j": last["j"]}
        converged = True
        while True:
            done_i = I >= i_cap or quiet["i"] >= 2
            done_j = J >= j_cap or quiet["j"] >= 2
            if done_i and done_j:
                break
            if used >= max_terms:
                converged = False
                break
            if done_j or (not done_i and err["i"] >= err["j"]):
                width = int(min(max(8, I // 2), i_cap - I))
                rows = max(1, _MAX_BLOCK // max(J, 1))
                strip_sum, strip_abs, inner, outer = 0.0, 0.0, None, None
                for a in range(I, I + width, rows):
                    b = min(I + width, a + rows)
                    blk = self.block(a, b, 0, J, x, y)
                    strip_sum += math.fsum(blk.ravel())
                    strip_abs += np.abs(blk).sum()
                    if inner is None:
                        inner = np.abs(blk[0, :]).max()
                    outer = np.abs(blk[-1, :]).max()
                I += width
                used += width * J
                key = "i"
            else:
                width = int(min(max(8, J // 2), j_cap - J))
                cols = max(1, _MAX_BLOCK // max(I, 1))
                strip_sum, strip_abs, inner, outer = 0.0, 0.0, None, None
                for a in range(J, J + width, cols):
                    b = min(J + width, a + cols)
                    blk = self.block(0, I, a, b, x, y)
                    strip_sum += math.fsum(blk.ravel())
                    strip_abs += np.abs(blk).sum()
                    if inner is None:
                        inner = np.abs(blk[:, 0]).max()
                    outer = np.abs(blk[:, -1]).max()
                J += width
                used += width * I
                key = "j"
            total += strip_sum
            err[key] = strip_abs
            small = strip_abs <= tol * abs(total) and outer <= max(inner, edge[key])
            edge[key] = outer
            quiet[key] = quiet[key] + 1 if small else 0
            if not small:
                # new mass in one direction re-opens the other
                quiet["j" if key == "i" else "i"] = 0
            if strip_abs == 0.0:
                quiet[key] = 2
        bound = 0.0
        if I < i_cap:
            bound += err["i"]
        if J < j_cap:
            bound += err["j"]
        converged = converged and bound <= tol * abs(total)
        return SeriesValue(total, used, float(bound), bool(converged))
