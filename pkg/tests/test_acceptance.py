"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL
line with the worst measured value against its tolerance."""

import time

import pytest

from orthoderiv import verify


def report(capsys, number, title, checks, elapsed=None, budget=None):
    failed = [c for c in checks if not c.passed]
    timing_ok = budget is None or elapsed <= budget
    ok = not failed and timing_ok
    worst = max(checks, key=lambda c: c.measured / c.tolerance)
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: "
            f"worst {worst.name} = {worst.measured:.3g} (tol {worst.tolerance:.3g})")
    if budget is not None:
        line += f", {elapsed:.1f} s (budget {budget:.0f} s)"
    if failed:
        line += f"; failing: {', '.join(c.name for c in failed)}"
    with capsys.disabled():
        print("\n" + line)
    assert not failed, [(c.name, c.measured, c.tolerance) for c in failed]
    assert timing_ok, f"took {elapsed:.1f} s, budget {budget} s"


def timed(fn):
    start = time.perf_counter()
    checks = fn()
    return checks, time.perf_counter() - start


def test_criterion_01_biorthogonality(capsys):
    checks, elapsed = timed(lambda: verify.run_suite("biortho"))
    report(capsys, 1, "biorthogonality", checks, elapsed, 30.0)


def test_criterion_02_kernel_oracle(capsys):
    checks, elapsed = timed(lambda: verify.run_suite("kernels"))
    report(capsys, 2, "kernel-oracle equivalence", checks, elapsed, 120.0)


def test_criterion_03_boundary_identities(capsys):
    report(capsys, 3, "boundary identities", verify.run_suite("boundary"))


def test_criterion_04_swap_symmetry(capsys):
    report(capsys, 4, "swap symmetry", verify.run_suite("symmetry"))


def test_criterion_05_pde_residuals(capsys):
    report(capsys, 5, "PDE residuals", verify.run_suite("pde"))


def test_criterion_06_continuation(capsys):
    report(capsys, 6, "F3 continuation and F_P decomposition", verify.run_suite("continuation"))


def test_criterion_07_derivative_exactness(capsys):
    # operator orders 0 to 2 on every monomial up to that order, all three deltas
    report(capsys, 7, "derivative exactness", verify.check_exactness(max_order=2))


@pytest.fixture(scope="module")
def convergence_checks():
    return verify.run_suite("fracderiv-convergence")


def test_criterion_08_delta_convergence(capsys, convergence_checks):
    checks = [c for c in convergence_checks if c.name.startswith("convergence/")]
    report(capsys, 8, "delta convergence", checks)


def test_criterion_09_fractional_eigenfunction(capsys, convergence_checks):
    checks = [c for c in convergence_checks if c.name.startswith("eigen/")]
    report(capsys, 9, "fractional eigenfunction", checks)


def test_criterion_10_spot_values(capsys):
    report(capsys, 10, "F2 spot values", verify.run_suite("spot"))
