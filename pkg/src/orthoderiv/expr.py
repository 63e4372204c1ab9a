"""A small arithmetic-expression language in x and y.

Supported: numbers, x, y, the constants pi and e, + - * / and ^ (or **),
unary minus, and the functions exp, sin, cos. Expressions are parsed with
the standard ast module into nested tuples, which can be evaluated on numpy
arrays and differentiated symbolically.
"""

import ast
import math

import numpy as np

from .errors import ParameterError

FUNCTIONS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "y")

_BINARY = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div",
           ast.Pow: "pow"}


def parse(text):
    """Parse an expression string into a tree of tuples."""
    try:
        # '^' means power here; rewrite it so it gets the precedence of '**'
        node = ast.parse(text.strip().replace("^", "**"), mode="eval").body
    except SyntaxError as exc:
        raise ParameterError(f"cannot parse expression {text!r}") from exc
    return _convert(node)


def _convert(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return ("num", float(node.value))
    if isinstance(node, ast.Name):
        if node.id in VARIABLES:
            return ("var", node.id)
        if node.id in CONSTANTS:
            return ("num", CONSTANTS[node.id])
        raise ParameterError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _convert(node.operand)
        return ("neg", inner) if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        return (_BINARY[type(node.op)], _convert(node.left), _convert(node.right))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and len(node.args) == 1 and not node.keywords:
        return ("call", node.func.id, _convert(node.args[0]))
    raise ParameterError(f"unsupported expression element: {ast.dump(node)}")


def evaluate(tree, x, y):
    """Value of a parsed expression; x and y may be numpy arrays."""
    op = tree[0]
    if op == "num":
        return tree[1]
    if op == "var":
        return x if tree[1] == "x" else y
    if op == "neg":
        return -evaluate(tree[1], x, y)
    if op == "call":
        return FUNCTIONS[tree[1]](evaluate(tree[2], x, y))
    a, b = evaluate(tree[1], x, y), evaluate(tree[2], x, y)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    return np.power(a, b)


def compile_expression(text):
    """Parse text and return f(x, y) working on broadcast arrays."""
    tree = parse(text)

    def f(x, y):
        with np.errstate(all="ignore"):
            return np.asarray(evaluate(tree, x, y), dtype=float) + 0.0 * (x + y)
    return f


def _has_var(tree):
    if tree[0] == "var":
        return True
    if tree[0] == "num":
        return False
    return any(_has_var(t) for t in tree[1:] if isinstance(t, tuple))


def _num(v):
    return ("num", float(v))


def _add(a, b):
    if a == ("num", 0.0):
        return b
    if b == ("num", 0.0):
        return a
    if a[0] == "num" and b[0] == "num":
        return _num(a[1] + b[1])
    return ("add", a, b)


def _sub(a, b):
    if b == ("num", 0.0):
        return a
    if a[0] == "num" and b[0] == "num":
        return _num(a[1] - b[1])
    return ("sub", a, b)


def _mul(a, b):
    if a == ("num", 0.0) or b == ("num", 0.0):
        return _num(0.0)
    if a == ("num", 1.0):
        return b
    if b == ("num", 1.0):
        return a
    if a[0] == "num" and b[0] == "num":
        return _num(a[1] * b[1])
    return ("mul", a, b)


def _neg(a):
    if a[0] == "num":
        return _num(-a[1])
    return ("neg", a)


def differentiate(tree, var):
    """Symbolic derivative with respect to "x" or "y".

    Powers with a variable exponent are not supported and raise
    ParameterError.
    """
    op = tree[0]
    if op == "num":
        return _num(0.0)
    if op == "var":
        return _num(1.0 if tree[1] == var else 0.0)
    if op == "neg":
        return _neg(differentiate(tree[1], var))
    if op == "call":
        name, inner = tree[1], tree[2]
        outer = {"exp": tree,
                 "sin": ("call", "cos", inner),
                 "cos": _neg(("call", "sin", inner))}[name]
        return _mul(outer, differentiate(inner, var))
    a, b = tree[1], tree[2]
    da, db = differentiate(a, var), differentiate(b, var)
    if op == "add":
        return _add(da, db)
    if op == "sub":
        return _sub(da, db)
    if op == "mul":
        return _add(_mul(da, b), _mul(a, db))
    if op == "div":
        return ("div", _sub(_mul(da, b), _mul(a, db)), ("pow", b, _num(2.0)))
    if _has_var(b):
        raise ParameterError("cannot differentiate a power with a variable exponent")
    if da == ("num", 0.0):
        return _num(0.0)
    return _mul(_mul(b, ("pow", a, _sub(b, _num(1.0)))), da)


def partial(tree, nx, ny):
    """d^nx/dx^nx d^ny/dy^ny of a parsed expression."""
    for _ in range(nx):
        tree = differentiate(tree, "x")
    for _ in range(ny):
        tree = differentiate(tree, "y")
    return tree
