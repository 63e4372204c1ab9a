"""Verification suites: each check compares two independent routes to the
same quantity, or a computed value against an analytic one.

Every suite function returns a list of Check records. Random samples come
from fixed seeds, so repeated runs give identical reports; wall-clock budgets
are therefore timed by the callers, not recorded here.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hyp2var as hv
from .frac_kernel import (FracSpec, KernelParams, kernel_closed_form, kernel_i5_i6_split,
                          kernel_l_form, w_delta_square, w_delta_triangle)
from .ortho_deriv import SquareJacobiSpec, TriangleDerivSpec, d_delta_square, d_delta_triangle
from .quad_oracle import integrate_kernel_region
from .triangle_basis import TriangleWeight, biortho_constant, pair_indices, pairing_matrix


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return {"name": self.name, "measured": self.measured, "tolerance": self.tolerance,
                "pass": self.passed}


def _check(name, measured, tolerance):
    measured = float(measured)
    return Check(name, measured, tolerance, bool(measured <= tolerance))


# ------------------------------------------------------------ biorthogonality

BIORTHO_WEIGHTS = [(0.0, 0.0, 0.0), (0.5, -0.3, 0.0), (-0.3, 0.5, 0.5)]


def check_biortho(n_max=4, weights=BIORTHO_WEIGHTS):
    """Gram matrix of U against V is diagonal with the known constants."""
    out = []
    idx = pair_indices(n_max)
    for w in weights:
        tw = TriangleWeight(*w)
        gram = pairing_matrix(n_max, n_max, tw)
        diag = np.array([biortho_constant(k, n, tw) for n, k in idx])
        off = gram - np.diag(np.diag(gram))
        rel = np.abs(np.diag(gram) / diag - 1.0)
        out.append(_check(f"biortho/offdiag/{w}", np.max(np.abs(off)), 1e-8))
        out.append(_check(f"biortho/diag/{w}", np.max(rel), 1e-8))
    return out


# ------------------------------------------------------------- kernel oracle

def sample_region_point(region, rng, margin=0.02):
    """Random (s, t) inside a region, at least `margin` from its edges."""
    if region == "I":
        s = rng.uniform(margin, 1.0 - 3 * margin)
        return s, rng.uniform(margin, 1.0 - s - margin)
    if region == "II":
        return rng.uniform(1.0 + margin, 4.0), rng.uniform(1.0 + margin, 4.0)
    if region == "III":
        return rng.uniform(margin, 1.0 - margin), rng.uniform(1.0 + margin, 4.0)
    if region == "IV":
        return rng.uniform(1.0 + margin, 4.0), rng.uniform(margin, 1.0 - margin)
    s = rng.uniform(3 * margin, 1.0 - margin)
    return s, rng.uniform(1.0 - s + margin, 1.0 - margin)


def sample_kernel_params(rng, lo=0.15, hi=0.95):
    """a..e drawn independently from (lo, hi); every region's conditions hold."""
    return KernelParams(*rng.uniform(lo, hi, 5))


def check_kernels(n_samples=20, seed=7, oracle_nodes=96):
    """Closed-form kernels against quadrature of their defining integrals."""
    rng = np.random.default_rng(seed)
    out = []
    for region in ("I", "II", "III", "IV", "V"):
        worst = 0.0
        for _ in range(n_samples):
            p = sample_kernel_params(rng)
            s, t = sample_region_point(region, rng)
            closed = kernel_closed_form(region, p, s, t, tol=1e-12)
            oracle = integrate_kernel_region(region, p, s, t, n_nodes=oracle_nodes)
            worst = max(worst, abs(closed - oracle) / abs(oracle))
        out.append(_check(f"kernels/{region}/max_rel_err", worst, 1e-6))
    return out


# ---------------------------------------------------------- boundary limits

# every non-integer power appearing at the region-V edges exceeds 2 for these
# parameters, so the interior values are smooth enough in the distance for
# Richardson extrapolation
BOUNDARY_DERIV = (0.2, 0.3, 0.2, 1, 3, 0.4, 0.3)
BOUNDARY_EPS = 1e-3 * 2.0 ** -np.arange(3)


def richardson_zero(eps, values):
    """Value at eps = 0 of the polynomial through (eps_i, values_i)."""
    eps = np.asarray(eps, dtype=float)
    A = np.vander(eps, len(eps), increasing=True)
    return float(np.linalg.solve(A, np.asarray(values, dtype=float))[0])


def check_boundary(deriv=BOUNDARY_DERIV, anchors=(0.3, 0.6), eps=BOUNDARY_EPS, tol=1e-12):
    """Region-V values approaching each edge agree with the neighbouring
    region's formula on the edge; I5 vanishes on s = 1."""
    p = KernelParams.from_deriv(*deriv)
    out = []

    def limit(path):
        return richardson_zero(eps, [kernel_closed_form("V", p, *path(h), tol=tol) for h in eps])

    for a in anchors:
        edges = [
            ("s=1", lambda h: (1.0 - h, a), (1.0, a)),
            ("t=1", lambda h: (a, 1.0 - h), (a, 1.0)),
            ("s+t=1", lambda h: (a + h / 2, 1.0 - a + h / 2), (a, 1.0 - a)),
        ]
        for name, path, edge in edges:
            other = kernel_closed_form(None, p, *edge, tol=tol)
            out.append(_check(f"boundary/{name}/anchor={a}", abs(limit(path) - other), 1e-5))
        i5 = richardson_zero(eps, [kernel_i5_i6_split(p, 1.0 - h, a, tol)[0] for h in eps])
        out.append(_check(f"boundary/I5(s=1)/anchor={a}", abs(i5), 1e-5))
    corner = kernel_closed_form(None, p, 1.0, 1.0, tol=tol)
    out.append(_check("boundary/s=t=1", abs(limit(lambda h: (1.0 - h, 1.0 - h)) - corner), 1e-5))
    return out


# ------------------------------------------------------------ swap symmetry

def check_symmetry(n_points=50, seed=11, tol=1e-13):
    """Region-V three-term form against the same form with the roles of
    (a, c, s) and (b, d, t) exchanged."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        p = sample_kernel_params(rng)
        s, t = sample_region_point("V", rng)
        v1 = kernel_l_form(p, s, t, tol)
        v2 = kernel_l_form(p.swapped(), t, s, tol)
        worst = max(worst, abs(v1 - v2) / max(abs(v1), 1e-300))
    return [_check("symmetry/max_rel_diff", worst, 1e-10)]


# ------------------------------------------------------------ PDE residuals

PDE_PARAMS = (0.6, 0.7, 0.35, 0.4, 0.3)


def kernel_pde_solutions(p, tol=1e-13):
    """Seven local solutions of the F2 system attached to the kernel
    parameters, each with a sampler for points of its domain."""
    a, b, c, d, e = p

    def inside_v(rng):
        s = rng.uniform(0.15, 0.9)
        return s, rng.uniform(1.0 - s + 0.1, 0.95)

    def inside_v_right(rng):
        # keeps the inner argument (s-1)/s of the F_P rows above -1
        s = rng.uniform(0.5, 0.9)
        return s, rng.uniform(1.0 - s + 0.1, 0.95)

    def unit(rng):
        s = rng.uniform(0.1, 0.45)
        return s, rng.uniform(0.1, 0.8 - s)

    def beyond(rng):
        return rng.uniform(1.3, 4.0), rng.uniform(1.3, 4.0)

    def strip(rng):
        return rng.uniform(0.1, 0.9), rng.uniform(1.3, 4.0)

    return {
        "F2": (lambda s, t: s ** (a + c - 1) * t ** (b + d - 1)
               * hv.f2(e, a, b, a + c, b + d, s, t, tol).value, unit),
        "F2-second": (lambda s, t: s ** (a + c - 1)
                      * hv.f2(e - b - d + 1, a, 1 - d, a + c, 2 - b - d, s, t, tol).value, unit),
        "F3-inverse": (lambda s, t: s ** (c - 1) * t ** (d - 1)
                       * hv.f3(a, b, 1 - c, 1 - d, a + b + 1 - e, 1 / s, 1 / t, tol).value, beyond),
        "FP": (lambda s, t: t ** (b + d - 1)
               * hv.fp(e - c - a + 1, b, 1 - c, b + d, 2 - a - c, t, s, tol).value, inside_v_right),
        "F3-edge": (lambda s, t: s ** (a - 1) * t ** (d - 1) * (1 - s) ** (b + c - e)
                    * hv.f3(1 - a, b, c, 1 - d, b + c - e + 1, (s - 1) / s, (1 - s) / t, tol).value,
                    inside_v),
        "F3-diagonal": (lambda s, t: s ** (a - 1) * t ** (b - 1) * (s + t - 1) ** (c + d - e)
                        * hv.f3(1 - a, 1 - b, c, d, c + d - e + 1,
                                (s + t - 1) / s, (s + t - 1) / t, tol).value, inside_v),
        "H2": (lambda s, t: s ** (a + c - 1) * t ** (d - 1)
               * hv.h2(e - b, a, 1 - d, b, a + c, s, -1 / t, tol).value, strip),
    }


def check_pde(params=PDE_PARAMS, n_points=10, seed=5, h=1e-3):
    a, b, c, d, e = params
    system = (e - a - b - c - d + 2, 1 - c, 1 - d, 2 - a - c, 2 - b - d)
    rng = np.random.default_rng(seed)
    out = []
    for name, (sol, sampler) in kernel_pde_solutions(params).items():
        worst = 0.0
        for _ in range(n_points):
            s, t = sampler(rng)
            r1, r2 = hv.f2_pde_residual(*system, sol, s, t, h=h)
            worst = max(worst, abs(r1), abs(r2))
        out.append(_check(f"pde/{name}", worst, 1e-4))
    return out


# ----------------------------------------------------------- continuations

CONT_PARAMS = (0.3, 0.4, 0.6, 0.5, 1.7)
FP_PARAMS = (0.6, 0.3, 0.7, 1.4, 1.6)


def check_continuation(n_points=20, seed=3):
    """F3 against its F_Q + F3 continuation, and F_P against its split into
    regular and singular parts near (1, 1)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        x2 = rng.uniform(0.3, 0.95)
        x1 = rng.uniform(0.05, 0.9 * x2 / (2.0 - x2))
        left, right = hv.f3_continuation(*CONT_PARAMS, x1, x2, tol=1e-13)
        worst = max(worst, abs(left - right) / abs(left))
    out = [_check("continuation/F3", worst, 1e-8)]
    worst = 0.0
    for _ in range(n_points):
        x = rng.uniform(0.8, 0.97)
        y = rng.uniform(0.85, 1.15)
        direct = hv.fp(*FP_PARAMS, x, y, tol=1e-13, method="rows").value
        reg, sing = hv.fp_decomposition(*FP_PARAMS, x, y, tol=1e-13)
        worst = max(worst, abs(direct - reg.value - sing.value) / abs(direct))
    out.append(_check("continuation/FP-decomposition", worst, 1e-8))
    return out


# ------------------------------------------------------ derivative exactness

EXACT_SQUARE_WEIGHTS = [(0.0, 0.0, 0.0, 0.0), (0.5, -0.3, 0.2, 0.1), (-0.4, 0.3, 0.0, 0.6),
                        (-0.5, -0.5, -0.5, -0.5)]
EXACT_TRIANGLE_WEIGHTS = [(0.0, 0.0, 0.0), (0.2, 0.2, 0.2), (0.0, 0.5, -0.3), (-0.5, -0.5, -0.5)]
EXACT_DELTAS = (0.5, 0.1, 0.01)


def monomial_partial(i, j, m, l, x, y):
    """d^m/dx^m d^l/dy^l of x^i y^j."""
    if m > i or l > j:
        return 0.0
    cx = math.factorial(i) / math.factorial(i - m)
    cy = math.factorial(j) / math.factorial(j - l)
    return cx * cy * x ** (i - m) * y ** (j - l)


def _monomials(order):
    return [(i, j) for i in range(order + 1) for j in range(order + 1 - i)]


def check_exactness(x=0.3, y=-0.2, max_order=2, deltas=EXACT_DELTAS):
    """Finite-delta derivatives of every order up to max_order are exact on
    monomials up to that order, for each delta."""
    out = []
    for w in EXACT_SQUARE_WEIGHTS:
        worst = 0.0
        for m, l in _monomials(max_order):
            spec = SquareJacobiSpec(*w, m, l)
            for i, j in _monomials(m + l):
                exact = monomial_partial(i, j, m, l, x, y)
                for delta in deltas:
                    val = d_delta_square(lambda u, v: u ** i * v ** j, x, y, spec, delta)
                    worst = max(worst, abs(val - exact))
        out.append(_check(f"exactness/square/{w}", worst, 1e-10))
    for w in EXACT_TRIANGLE_WEIGHTS:
        worst = 0.0
        for n in range(max_order + 1):
            for k in range(n + 1):
                for i, j in _monomials(n):
                    exact = monomial_partial(i, j, k, n - k, x, y)
                    for delta in deltas:
                        spec = TriangleDerivSpec(TriangleWeight(*w), k, n, delta)
                        val = d_delta_triangle(lambda u, v: u ** i * v ** j, x, y, spec)
                        worst = max(worst, abs(val - exact))
        out.append(_check(f"exactness/triangle/{w}", worst, 1e-10))
    return out


# ---------------------------------------------------------- delta sequences

CONVERGENCE_DELTAS = (0.2, 0.1, 0.05, 0.025)

TEST_FUNCTIONS = {
    "exp": (lambda x, y: np.exp(x + y), lambda x, y: np.exp(x + y)),
    "sin": (lambda x, y: np.sin(x + 2 * y), lambda x, y: -2.0 * np.sin(x + 2 * y)),
}


def _sequence_checks(name, errors, final_tol):
    errors = np.asarray(errors, dtype=float)
    worst_ratio = float(np.max(errors[1:] / errors[:-1]))
    return [Check(f"{name}/max_error_ratio", worst_ratio, 1.0, bool(worst_ratio < 1.0)),
            _check(f"{name}/final_error", errors[-1], final_tol)]


def check_delta_convergence(x=0.3, y=0.2, deltas=CONVERGENCE_DELTAS):
    """Mixed second derivatives of smooth functions as delta is halved."""
    out = []
    square = SquareJacobiSpec(0.0, 0.0, 0.0, 0.0, 1, 1)
    weight = TriangleWeight(0.2, 0.2, 0.2)
    for fname, (f, df) in TEST_FUNCTIONS.items():
        exact = df(x, y)
        errs = [abs(d_delta_square(f, x, y, square, d) - exact) for d in deltas]
        out += _sequence_checks(f"convergence/square/{fname}", errs, 1e-3)
        errs = [abs(d_delta_triangle(f, x, y, TriangleDerivSpec(weight, 1, 2, d)) - exact)
                for d in deltas]
        out += _sequence_checks(f"convergence/triangle/{fname}", errs, 1e-3)
    return out


EIGEN_DELTAS = (0.2, 0.1, 0.05)


def check_eigen(x=0.3, y=0.2, orders=(0.4, 0.5), deltas=EIGEN_DELTAS, n_nodes=24):
    """Fractional derivatives of exp(-x-y) tend to exp(-x-y); checked at the
    last delta and for improvement under halving."""
    out = []
    f = lambda u, v: np.exp(-u - v)  # noqa: E731
    ref = math.exp(-x - y)
    for mu in orders:
        errs = [abs(w_delta_square(f, x, y, FracSpec(mu, mu, d, (0.2, 0.2, 0.2, 0.2), m=2, l=1),
                                   n_nodes=n_nodes) / ref - 1.0) for d in deltas]
        out += _sequence_checks(f"eigen/square/mu={mu}", errs, 1e-2)
        errs = [abs(w_delta_triangle(f, x, y, FracSpec(mu, mu, d, (0.2, 0.2, 0.2), k=1, n=2),
                                     n_nodes=n_nodes) / ref - 1.0) for d in deltas]
        out += _sequence_checks(f"eigen/triangle/mu={mu}", errs, 1e-2)
    return out


# -------------------------------------------------------------- spot values

def check_spot(n=5):
    """F2(1; 1, 1; 1, 1; x, y) = 1/(1-x-y)."""
    worst = 0.0
    for x in np.linspace(0.0, 0.4, n):
        for y in np.linspace(0.0, 0.4, n):
            val = hv.f2(1.0, 1.0, 1.0, 1.0, 1.0, x, y).value
            worst = max(worst, abs(val - 1.0 / (1.0 - x - y)))
    return [_check("spot/F2-geometric", worst, 1e-10)]


SUITES = {
    "biortho": [check_biortho],
    "kernels": [check_kernels],
    "boundary": [check_boundary],
    "symmetry": [check_symmetry],
    "pde": [check_pde],
    "continuation": [check_continuation],
    "fracderiv-convergence": [check_delta_convergence, check_eigen],
    "exactness": [check_exactness],
    "spot": [check_spot],
}


def run_suite(name):
    """All checks of a named suite, in a fixed order."""
    if name == "all":
        return [c for key in SUITES for c in run_suite(key)]
    if name not in SUITES:
        raise KeyError(name)
    return [c for fn in SUITES[name] for c in fn()]
