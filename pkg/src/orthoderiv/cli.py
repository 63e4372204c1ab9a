"""Command-line front end.

    orthoderiv eval F2 a=1 b1=1 b2=1 c1=1 c2=1 x=0.2 y=0.3
    orthoderiv kernel a=1 b=1 c=1 d=1 e=0 s=0.3 t=0.4
    orthoderiv kernel --from-deriv alpha=0.2 beta=0.3 gamma=0.1 k=1 n=2 mu=0.4 nu=0.3 s=0.6 t=0.7 --oracle
    orthoderiv deriv --domain triangle --f "x*y" --k 1 --n 2 --delta 0.1 x0=0 x1=1 nx=3 y0=0 y1=1 ny=3
    orthoderiv fracderiv --domain square --f exp-decay --mu 0.5 --nu 0.5 --delta 0.05 ...
    orthoderiv verify --suite biortho

Parameters are given as key=value words, as --key value options, or in a
config file of key=value lines (--config); options override words, words
override the config file. Unknown keys are rejected.

Exit codes: 0 ok, 1 usage error, 2 region error, 3 parameter error,
4 verification failure.

JSON records are written with sorted keys and shortest round-trip floats.
CSV grids use ',' separators, '.' decimals, LF line endings and a header.
"""

import argparse
import csv
import io
import json
import math
import re
import sys
import warnings

import numpy as np

from . import expr
from . import hyp2var as hv
from .errors import ConvergenceError, ParameterError, RegionError
from .frac_kernel import (FracSpec, KernelParams, RegionTag, kernel_closed_form,
                          region_classify, w_delta_square, w_delta_triangle)
from .ortho_deriv import SquareJacobiSpec, TriangleDerivSpec, d_delta_square, d_delta_triangle
from .quad_oracle import integrate_kernel_region
from .triangle_basis import TriangleWeight

EXIT_OK, EXIT_USAGE, EXIT_REGION, EXIT_PARAM, EXIT_VERIFY = 0, 1, 2, 3, 4

EVAL_PARAMS = {
    "F1": ("a", "b1", "b2", "c"),
    "F2": ("a", "b1", "b2", "c1", "c2"),
    "F3": ("a1", "a2", "b1", "b2", "c"),
    "F3ext": ("a1", "a2", "b1", "b2", "c", "d1", "d2"),
    "H2": ("a", "b1", "b2", "c1", "c2"),
    "FP": ("a", "b1", "b2", "c1", "c2"),
    "FQ": ("a", "b1", "b2", "c1", "c2"),
    "FPR": ("a", "b1", "b2", "c1", "c2"),
}
RAW_KERNEL = ("a", "b", "c", "d", "e")
DERIV_KERNEL = ("alpha", "beta", "gamma", "k", "n", "mu", "nu")
GRID = ("x0", "x1", "nx", "y0", "y1", "ny")
INTEGER_KEYS = {"k", "n", "m", "l", "nx", "ny", "n_nodes", "oracle_nodes"}

# registry of named test functions for the grid commands; the Weyl-type
# fractional derivative reproduces exp(-x-y), which gives its reference
REGISTRY = {
    "polynomial": "x^3*y + 2*x*y^2 - y^3 + 0.5*x^2 + 1",
    "exp-decay": "exp(-x-y)",
    "trigonometric": "sin(x + 2*y)",
}
FRAC_REFERENCE = {"exp-decay"}

_DECIMAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"[+-]?\d+$")


class UsageError(Exception):
    """Malformed command line or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------ parameters

def parse_number(key, text):
    """Decimal real (or integer for count and order keys) from text."""
    text = str(text).strip()
    if key in INTEGER_KEYS:
        if not _INTEGER.match(text):
            raise UsageError(f"{key} must be an integer, got {text!r}")
        return int(text)
    if not _DECIMAL.match(text):
        raise UsageError(f"{key} must be a decimal number, got {text!r}")
    return float(text)


def read_config(path):
    """key=value lines; blank lines and lines starting with '#' are skipped."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _split_words(words):
    out, rest = {}, []
    for w in words:
        if "=" in w:
            key, value = w.split("=", 1)
            out[key.strip()] = value.strip()
        else:
            rest.append(w)
    return out, rest


def collect(args, allowed):
    """Merge config file, key=value words and --key options into one map of
    raw strings, rejecting keys outside `allowed`."""
    raw = read_config(args.config) if args.config else {}
    words, rest = _split_words(args.words)
    raw.update(words)
    for key in allowed:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise UsageError(f"unknown parameter(s): {', '.join(unknown)}")
    return raw, rest


def numbers(raw, keys, required=True):
    out = {}
    for key in keys:
        if key not in raw:
            if required:
                raise UsageError(f"missing parameter {key}")
            continue
        out[key] = parse_number(key, raw[key])
    return out


# ---------------------------------------------------------------- output

def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_value(x) for x in v]
    return v


def to_json(record):
    return json.dumps(_json_value(record), sort_keys=True, indent=2) + "\n"


def _csv_text(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_text(v) for v in row])
    return buf.getvalue()


def _flat(record):
    out = {}
    for key, value in record.items():
        if isinstance(value, dict):
            out.update(_flat(value))
        else:
            out[key] = value
    return out


def record_text(record, fmt):
    if fmt == "csv":
        flat = _flat(record)
        keys = sorted(flat)
        return to_csv(keys, [[flat[k] for k in keys]])
    return to_json(record)


def emit(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -------------------------------------------------------------- commands

def cmd_eval(args):
    if not args.words or "=" in args.words[0]:
        raise UsageError(f"eval needs a function kind first: {', '.join(EVAL_PARAMS)}")
    kind = args.words[0]
    if kind not in EVAL_PARAMS:
        raise UsageError(f"unknown function kind {kind!r}; choose from {', '.join(EVAL_PARAMS)}")
    args.words = args.words[1:]
    names = EVAL_PARAMS[kind]
    raw, rest = collect(args, names + ("x", "y", "tol"))
    if rest:
        raise UsageError(f"unexpected argument(s): {' '.join(rest)}")
    params = numbers(raw, names)
    point = numbers(raw, ("x", "y"))
    tol = numbers(raw, ("tol",), required=False).get("tol")
    spec = hv.Hyp2Params(kind, tuple(params[k] for k in names), point["x"], point["y"])
    sv = hv.evaluate(spec, tol=tol)
    record = {"kind": kind, "params": params, "x": point["x"], "y": point["y"],
              "value": float(sv.value), "terms_used": int(sv.terms_used),
              "err_estimate": float(sv.err_estimate), "converged": bool(sv.converged)}
    emit(record_text(record, args.format or "json"), args.output)
    return EXIT_OK


def cmd_kernel(args):
    keys = RAW_KERNEL + DERIV_KERNEL + ("s", "t", "tol", "oracle_nodes")
    raw, rest = collect(args, keys)
    if rest:
        raise UsageError(f"unexpected argument(s): {' '.join(rest)}")
    raw_given = [k for k in RAW_KERNEL if k in raw]
    deriv_given = [k for k in DERIV_KERNEL if k in raw]
    point = numbers(raw, ("s", "t"))
    s, t = point["s"], point["t"]
    region = region_classify(s, t)
    if region is RegionTag.OUTSIDE and not (raw_given or deriv_given):
        # the kernel integral is empty outside the first quadrant for any parameters
        record = {"region": region.value, "params": {}, "s": s, "t": t, "value": 0.0}
        if args.oracle:
            record.update(oracle_value=0.0, abs_diff=0.0)
        emit(record_text(record, args.format or "json"), args.output)
        return EXIT_OK
    if args.from_deriv:
        if raw_given:
            raise UsageError("--from-deriv takes alpha, beta, gamma, k, n, mu, nu only")
        dp = numbers(raw, DERIV_KERNEL)
        p = KernelParams.from_deriv(*(dp[k] for k in DERIV_KERNEL))
        params = dict(dp)
    else:
        if deriv_given:
            raise UsageError("derivative-style parameters need --from-deriv")
        params = numbers(raw, RAW_KERNEL)
        p = KernelParams(*(params[k] for k in RAW_KERNEL))
    extra = numbers(raw, ("tol", "oracle_nodes"), required=False)
    value = kernel_closed_form(None, p, s, t, tol=extra.get("tol"))
    record = {"region": region.value, "params": params, "s": s, "t": t, "value": float(value)}
    if args.from_deriv:
        record["kernel_params"] = dict(zip(RAW_KERNEL, p.as_tuple()))
    if args.oracle:
        if region is RegionTag.OUTSIDE:
            oracle = 0.0
        else:
            oracle = integrate_kernel_region(region.value, p, s, t,
                                             extra.get("oracle_nodes", 96))
        record["oracle_value"] = float(oracle)
        record["abs_diff"] = abs(float(oracle) - float(value))
    emit(record_text(record, args.format or "json"), args.output)
    return EXIT_OK


def _grid(raw):
    g = numbers(raw, GRID)
    if g["nx"] < 1 or g["ny"] < 1:
        raise UsageError("grid needs nx >= 1 and ny >= 1")
    xs = np.linspace(g["x0"], g["x1"], g["nx"]) if g["nx"] > 1 else np.array([g["x0"]])
    ys = np.linspace(g["y0"], g["y1"], g["ny"]) if g["ny"] > 1 else np.array([g["y0"]])
    return [(float(x), float(y)) for x in xs for y in ys]


def _function(name):
    """(f, tree, registry name or None) for a registry name or expression."""
    text = REGISTRY.get(name, name)
    tree = expr.parse(text)
    f = expr.compile_expression(text)
    return f, tree, (name if name in REGISTRY else None)


def _grid_rows(points, compute, reference):
    rows, failed = [], 0
    for x, y in points:
        try:
            value = float(compute(x, y))
        except (RegionError, ConvergenceError, ArithmeticError):
            value = math.nan
        if not math.isfinite(value):
            failed += 1
        row = [x, y, value]
        if reference is not None:
            try:
                with np.errstate(all="ignore"):
                    ref = float(reference(np.float64(x), np.float64(y)))
            except ArithmeticError:
                ref = math.nan
            row += [ref, abs(value - ref)]
        rows.append(row)
    return rows, failed


def _write_grid(args, rows, has_ref, failed):
    header = ["x", "y", "value"] + (["reference", "abs_err"] if has_ref else [])
    if (args.format or "csv") == "json":
        text = to_json([dict(zip(header, r)) for r in rows])
    else:
        text = to_csv(header, rows)
    emit(text, args.output)
    if failed:
        sys.stderr.write(f"warning: {failed} grid point(s) could not be evaluated (nan rows)\n")


_WEIGHT_KEYS = ("alpha", "beta", "gamma", "delta_w")


def cmd_deriv(args):
    keys = ("domain", "f", "delta", "m", "l", "k", "n", "n_nodes") + _WEIGHT_KEYS + GRID
    raw, rest = collect(args, keys)
    if rest:
        raise UsageError(f"unexpected argument(s): {' '.join(rest)}")
    domain, fname = raw.get("domain", "square"), raw.get("f")
    if fname is None:
        raise UsageError("missing --f (registry name or expression)")
    points = _grid(raw)
    delta = numbers(raw, ("delta",))["delta"]
    w = {k: parse_number(k, raw.get(k, "0")) for k in _WEIGHT_KEYS}
    n_nodes = numbers(raw, ("n_nodes",), required=False).get("n_nodes")
    f, tree, _ = _function(fname)
    if domain == "square":
        o = numbers(raw, ("m", "l"))
        spec = SquareJacobiSpec(w["alpha"], w["beta"], w["gamma"], w["delta_w"], o["m"], o["l"])
        order = (o["m"], o["l"])

        def compute(x, y):
            return d_delta_square(f, x, y, spec, delta, n_nodes)
    elif domain == "triangle":
        if "delta_w" in raw:
            raise UsageError("delta_w applies to the square domain only")
        o = numbers(raw, ("k", "n"))
        spec = TriangleDerivSpec(TriangleWeight(w["alpha"], w["beta"], w["gamma"]),
                                 o["k"], o["n"], delta)
        order = (o["k"], o["n"] - o["k"])

        def compute(x, y):
            return d_delta_triangle(f, x, y, spec, n_nodes)
    else:
        raise UsageError(f"unknown domain {domain!r}; use square or triangle")
    try:
        ref_tree = expr.partial(tree, *order)
    except ParameterError:
        ref_tree = None
    reference = None if ref_tree is None else (lambda x, y: expr.evaluate(ref_tree, x, y))
    rows, failed = _grid_rows(points, compute, reference)
    _write_grid(args, rows, reference is not None, failed)
    return EXIT_OK


def cmd_fracderiv(args):
    keys = ("domain", "f", "delta", "mu", "nu", "m", "l", "k", "n", "n_nodes",
            "tol") + _WEIGHT_KEYS + GRID
    raw, rest = collect(args, keys)
    if rest:
        raise UsageError(f"unexpected argument(s): {' '.join(rest)}")
    domain, fname = raw.get("domain", "square"), raw.get("f")
    if fname is None:
        raise UsageError("missing --f (registry name or expression)")
    points = _grid(raw)
    v = numbers(raw, ("delta", "mu", "nu"))
    extra = numbers(raw, ("n_nodes", "tol"), required=False)
    n_nodes = extra.get("n_nodes", 24)
    f, _, name = _function(fname)
    if domain == "square":
        o = numbers(raw, ("m", "l"))
        weight = tuple(parse_number(k, raw.get(k, "0")) for k in _WEIGHT_KEYS)
        spec = FracSpec(v["mu"], v["nu"], v["delta"], weight, m=o["m"], l=o["l"])

        def compute(x, y):
            return w_delta_square(f, x, y, spec, n_nodes=n_nodes)
    elif domain == "triangle":
        if "delta_w" in raw:
            raise UsageError("delta_w applies to the square domain only")
        o = numbers(raw, ("k", "n"))
        weight = tuple(parse_number(k, raw.get(k, "0")) for k in _WEIGHT_KEYS[:3])
        spec = FracSpec(v["mu"], v["nu"], v["delta"], weight, k=o["k"], n=o["n"])

        def compute(x, y):
            return w_delta_triangle(f, x, y, spec, n_nodes=n_nodes, tol=extra.get("tol"))
    else:
        raise UsageError(f"unknown domain {domain!r}; use square or triangle")
    reference = f if name in FRAC_REFERENCE else None
    rows, failed = _grid_rows(points, compute, reference)
    _write_grid(args, rows, reference is not None, failed)
    return EXIT_OK


def cmd_verify(args):
    from .verify import SUITES, run_suite
    raw, rest = collect(args, ("suite",))
    if rest:
        raise UsageError(f"unexpected argument(s): {' '.join(rest)}")
    suite = raw.get("suite", "all")
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    checks = run_suite(suite)
    passed = all(c.passed for c in checks)
    report = {"suite": suite, "passed": passed, "checks": [c.as_dict() for c in checks]}
    if (args.format or "json") == "csv":
        text = to_csv(["name", "measured", "tolerance", "pass"],
                      [[c.name, c.measured, c.tolerance, c.passed] for c in checks])
    else:
        text = json.dumps(_json_value(report), indent=2) + "\n"
    emit(text, args.output)
    return EXIT_OK if passed else EXIT_VERIFY


# ---------------------------------------------------------------- parser

def _add_common(p, keys):
    p.add_argument("words", nargs="*", help="key=value parameters")
    p.add_argument("--config", help="file of key=value lines, overridden by the command line")
    p.add_argument("--output", "-o", help="output path (default: standard output)")
    p.add_argument("--format", choices=("json", "csv"))
    for key in keys:
        p.add_argument(f"--{key}", dest=key, metavar=key.upper())


def build_parser():
    parser = _Parser(prog="orthoderiv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("eval", help="evaluate a two-variable hypergeometric function")
    _add_common(p, ("x", "y", "tol"))
    p.set_defaults(run=cmd_eval)
    p = sub.add_parser("kernel", help="fractional triangle kernel at (s, t)")
    _add_common(p, RAW_KERNEL + DERIV_KERNEL + ("s", "t", "tol", "oracle_nodes"))
    p.add_argument("--from-deriv", action="store_true",
                   help="parameters are alpha, beta, gamma, k, n, mu, nu")
    p.add_argument("--oracle", action="store_true", help="also integrate the kernel directly")
    p.set_defaults(run=cmd_kernel)
    grid_keys = ("domain", "f", "delta", "m", "l", "k", "n", "n_nodes") + _WEIGHT_KEYS + GRID
    p = sub.add_parser("deriv", help="orthogonal derivative over a grid (CSV)")
    _add_common(p, grid_keys)
    p.set_defaults(run=cmd_deriv)
    p = sub.add_parser("fracderiv", help="fractional orthogonal derivative over a grid (CSV)")
    _add_common(p, grid_keys + ("mu", "nu", "tol"))
    p.set_defaults(run=cmd_fracderiv)
    p = sub.add_parser("verify", help="run verification suites (JSON report)")
    _add_common(p, ("suite",))
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # key=value words may follow options; argparse leaves those over
        stray = [w for w in extra if w.startswith("-") or "=" not in w]
        if stray:
            raise UsageError(f"unrecognized arguments: {' '.join(stray)}")
        if extra:
            args.words = list(args.words) + extra
        if args.command is None:
            raise UsageError("missing command: eval, kernel, deriv, fracderiv or verify")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.run(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except RegionError as exc:
        sys.stderr.write(f"region error: {exc}\n")
        return EXIT_REGION
    except ParameterError as exc:
        sys.stderr.write(f"parameter error: {exc}\n")
        return EXIT_PARAM
    except ConvergenceError as exc:
        sys.stderr.write(f"convergence error: {exc}\n")
        return EXIT_PARAM
    except ValueError as exc:
        # e.g. a malformed ORTHODERIV_TOL
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
