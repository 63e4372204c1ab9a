import csv
import io
import json
import math

import numpy as np
import pytest

from orthoderiv import cli, expr, verify
from orthoderiv.errors import ParameterError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_f2_geometric(capsys):
    rec = run_json(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2", "y=0.3")
    np.testing.assert_allclose(rec["value"], 2.0, rtol=1e-12)
    assert set(rec) == {"kind", "params", "x", "y", "value", "terms_used", "err_estimate",
                        "converged"}
    assert rec["converged"] is True


def test_eval_f3_origin(capsys):
    rec = run_json(capsys, "eval", "F3", "a1=0.3", "a2=0.4", "b1=0.5", "b2=0.6", "c=1.7",
                   "x=0", "y=0")
    assert rec["value"] == 1.0


def test_eval_h2_outside_region(capsys):
    code, _, err = run(capsys, "eval", "H2", "a=0.3", "b1=0.4", "b2=0.5", "c1=0.6", "c2=1.7",
                       "x=2", "y=0.5")
    assert code == 2 and "region" in err


def test_eval_parameter_error(capsys):
    code, _, _ = run(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=-2", "c2=1", "x=0.1", "y=0.1")
    assert code == 3


def test_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "eval")[0] == 1
    assert run(capsys, "eval", "F9", "x=0")[0] == 1
    assert run(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2")[0] == 1
    assert run(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2", "y=0.1",
               "zz=3")[0] == 1
    assert run(capsys, "eval", "F2", "a=one", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2",
               "y=0.1")[0] == 1
    assert run(capsys, "nosuch")[0] == 1


def test_kernel_region_one(capsys):
    rec = run_json(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "s=0.3", "t=0.4")
    assert rec["region"] == "I"
    np.testing.assert_allclose(rec["value"], 0.12, rtol=1e-13)


def test_kernel_from_deriv_oracle(capsys):
    rec = run_json(capsys, "kernel", "--from-deriv", "alpha=0.2", "beta=0.3", "gamma=0.1", "k=1",
                   "n=2", "mu=0.4", "nu=0.3", "s=0.6", "t=0.7", "--oracle")
    assert rec["region"] == "V"
    assert rec["abs_diff"] <= 1e-6
    np.testing.assert_allclose(rec["kernel_params"]["a"], 2.2, rtol=1e-15)


def test_kernel_outside(capsys):
    rec = run_json(capsys, "kernel", "s=-1", "t=0.5")
    assert rec["region"] == "OUTSIDE" and rec["value"] == 0.0


def test_kernel_mixed_styles_rejected(capsys):
    assert run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "mu=0.3", "s=0.3",
               "t=0.4")[0] == 1
    assert run(capsys, "kernel", "--from-deriv", "a=1", "alpha=0.2", "beta=0.3", "gamma=0.1",
               "k=1", "n=2", "mu=0.4", "nu=0.3", "s=0.6", "t=0.7")[0] == 1


def test_kernel_parameter_error(capsys):
    assert run(capsys, "kernel", "a=-0.5", "b=1", "c=1", "d=1", "e=0", "s=0.3", "t=0.4")[0] == 3


def test_deriv_triangle_mixed(capsys):
    code, out, _ = run(capsys, "deriv", "--domain", "triangle", "--f", "x*y", "--k", "1",
                       "--n", "2", "--delta", "0.1", "x0=0", "x1=0.5", "nx=3", "y0=0", "y1=0.4",
                       "ny=3")
    assert code == 0
    assert out.splitlines()[0] == "x,y,value,reference,abs_err"
    table = rows(out)
    assert len(table) == 9
    for r in table:
        assert float(r["reference"]) == 1.0
        assert abs(float(r["value"]) - 1.0) <= 1e-10


def test_deriv_square_registry(capsys):
    code, out, _ = run(capsys, "deriv", "--f", "polynomial", "--m", "1", "--l", "1", "--delta",
                       "0.1", "x0=-0.5", "x1=0.5", "nx=2", "y0=0", "y1=0", "ny=1")
    assert code == 0
    for r in rows(out):
        # the polynomial has total degree 4, so delta = 0.1 leaves an O(delta^2) gap
        assert float(r["abs_err"]) <= 1e-1


def test_fracderiv_exp_decay_improves(capsys):
    errs = []
    for delta in ("0.2", "0.1", "0.05"):
        code, out, _ = run(capsys, "fracderiv", "--domain", "square", "--f", "exp-decay",
                           "--mu", "0.5", "--nu", "0.5", "--delta", delta, "--m", "2", "--l", "1",
                           "x0=0.3", "x1=0.3", "nx=1", "y0=0.2", "y1=0.2", "ny=1")
        assert code == 0
        errs.append(float(rows(out)[0]["abs_err"]))
    assert errs[2] < errs[1] < errs[0]


def test_fracderiv_without_reference(capsys):
    code, out, _ = run(capsys, "fracderiv", "--f", "exp(-x-2*y)", "--mu", "0.5", "--nu", "0.5",
                       "--delta", "0.1", "--m", "2", "--l", "1", "x0=0", "x1=0", "nx=1", "y0=0",
                       "y1=0", "ny=1")
    assert code == 0
    assert out.splitlines()[0] == "x,y,value"


def test_empty_grid(capsys):
    code, _, _ = run(capsys, "deriv", "--f", "x", "--m", "1", "--l", "0", "--delta", "0.1",
                     "x0=0", "x1=1", "nx=0", "y0=0", "y1=1", "ny=2")
    assert code == 1


def test_nan_rows_flagged(capsys):
    code, out, err = run(capsys, "deriv", "--f", "1/x", "--m", "1", "--l", "0", "--delta", "0.1",
                         "x0=0", "x1=1", "nx=2", "y0=0", "y1=0", "ny=1")
    assert code == 0
    values = [r["value"] for r in rows(out)]
    assert values[0] == "nan" and math.isfinite(float(values[1]))
    assert "warning" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# geometric case\na=1\nb1=1\nb2=1\nc1=1\nc2=1\nx=0.2\ny=0.3\n")
    rec = run_json(capsys, "eval", "F2", "--config", str(cfg))
    np.testing.assert_allclose(rec["value"], 2.0, rtol=1e-12)
    rec = run_json(capsys, "eval", "F2", "--config", str(cfg), "x=0.1", "--y", "0.4")
    assert (rec["x"], rec["y"]) == (0.1, 0.4)
    rec = run_json(capsys, "eval", "F2", "--config", str(cfg), "y=0.1", "--y", "0.4")
    assert rec["y"] == 0.4
    cfg.write_text("bogus=1\n")
    assert run(capsys, "eval", "F2", "--config", str(cfg))[0] == 1


def test_json_round_trip(capsys):
    args = ("a=0.1", "b1=0.30000000000000004", "b2=1e-3", "c1=1.7", "c2=2.25", "x=0.123456789012345",
            "y=-0.2")
    rec = run_json(capsys, "eval", "F2", *args)
    for word in args:
        key, text = word.split("=")
        stored = rec["params"].get(key, rec.get(key))
        assert stored == float(text)


def test_output_file_and_determinism(capsys, tmp_path):
    argv = ["kernel", "a=0.6", "b=0.7", "c=0.5", "d=0.4", "e=0.3", "s=0.7", "t=0.6"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(argv + ["--output", str(first)]) == 0
    assert cli.main(argv + ["--output", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert b"\r" not in first.read_bytes()


def test_csv_record_format(capsys):
    code, out, _ = run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "s=0.3", "t=0.4",
                       "--format", "csv")
    assert code == 0
    table = rows(out)
    assert table[0]["region"] == "I"


def test_tolerance_environment(capsys, monkeypatch):
    args = ("eval", "F2", "a=0.5", "b1=0.5", "b2=0.5", "c1=1.5", "c2=1.5", "x=0.3", "y=0.3")
    monkeypatch.setenv("ORTHODERIV_TOL", "1e-4")
    loose = run_json(capsys, *args)
    monkeypatch.setenv("ORTHODERIV_TOL", "1e-14")
    tight = run_json(capsys, *args)
    assert loose["terms_used"] < tight["terms_used"]
    np.testing.assert_allclose(loose["value"], tight["value"], rtol=1e-3)


def test_verify_spot(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "spot")
    report = json.loads(out)
    assert code == 0 and report["passed"] is True
    assert set(report["checks"][0]) == {"name", "measured", "tolerance", "pass"}


def test_verify_failure_exit(capsys, monkeypatch):
    failing = lambda: [verify.Check("always", 1.0, 0.5, False)]  # noqa: E731
    monkeypatch.setitem(verify.SUITES, "spot", [failing])
    code, out, _ = run(capsys, "verify", "--suite", "spot")
    assert code == 4 and json.loads(out)["passed"] is False


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "--suite", "nosuch")[0] == 1


def test_expression_parser():
    f = expr.compile_expression("2*x^2 - sin(pi*y)/2 + exp(0)")
    np.testing.assert_allclose(f(np.array([1.0]), np.array([0.5])), [2.5], rtol=1e-15)
    tree = expr.parse("x^3*y + cos(x*y)")
    d = expr.partial(tree, 1, 1)
    x, y = 0.4, 0.7
    exact = 3 * x ** 2 - math.sin(x * y) - x * y * math.cos(x * y)
    np.testing.assert_allclose(expr.evaluate(d, x, y), exact, rtol=1e-14)
    with pytest.raises(ParameterError):
        expr.partial(expr.parse("x^y"), 1, 0)
    with pytest.raises(ValueError):
        expr.parse("import os")
