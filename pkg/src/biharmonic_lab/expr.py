"""Inline expressions for maps and metrics.

Expressions are parsed with :mod:`ast` into a whitelisted tree and evaluated
on numpy arrays or on :class:`~biharmonic_lab.jets.Jet` values, so derivatives
of parsed fields are exact.  ``^`` means power.
"""

from __future__ import annotations

import ast
import math
import operator
from typing import Callable

from . import jets as jm
from .errors import ParseError
from .fields import Rect, ScalarField2
from .geometry import Metric2, conformal, general, warped
from .map_calculus import SmoothMap2

FUNCTIONS: dict[str, Callable] = {
    "exp": jm.exp, "log": jm.log, "ln": jm.log, "sqrt": jm.sqrt,
    "sin": jm.sin, "cos": jm.cos, "tan": jm.tan,
    "sinh": jm.sinh, "cosh": jm.cosh, "tanh": jm.tanh,
    "abs": jm.absolute,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


class Expr:
    """A parsed scalar expression in the given variables."""

    def __init__(self, text: str, variables: tuple = ("x", "y")):
        self.text = text
        self.variables = tuple(variables)
        src = text.replace("^", "**").strip()
        if not src:
            raise ParseError("empty expression")
        try:
            tree = ast.parse(src, mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
        self.used: set = set()
        self._fn = self._compile(tree.body)

    def _compile(self, node) -> Callable:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            c = float(node.value)
            return lambda env: c
        if isinstance(node, ast.Name):
            name = node.id
            if name in self.variables:
                self.used.add(name)
                return lambda env: env[name]
            if name in CONSTANTS:
                c = CONSTANTS[name]
                return lambda env: c
            raise ParseError(f"unknown name {name!r} in {self.text!r}; variables are {self.variables}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            lhs, rhs = self._compile(node.left), self._compile(node.right)
            return lambda env: op(lhs(env), rhs(env))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            op = _UNARY[type(node.op)]
            arg = self._compile(node.operand)
            return lambda env: op(arg(env))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            fn = FUNCTIONS.get(node.func.id)
            if fn is None:
                raise ParseError(f"unknown function {node.func.id!r} in {self.text!r}")
            if len(node.args) != 1 or node.keywords:
                raise ParseError(f"{node.func.id} takes exactly one argument")
            arg = self._compile(node.args[0])
            return lambda env: fn(arg(env))
        raise ParseError(f"unsupported syntax in {self.text!r}: {type(node).__name__}")

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise TypeError(f"expected {len(self.variables)} arguments")
        return self._fn(dict(zip(self.variables, args)))

    def __repr__(self) -> str:
        return f"Expr({self.text!r})"


def parse(text: str, variables: tuple = ("x", "y")) -> Expr:
    return Expr(text, variables)


def scalar_field(text: str, variables: tuple = ("x", "y")) -> ScalarField2:
    e = parse(text, variables)
    return ScalarField2(e, analytic=True, name=text.strip())


def _split(text: str, n: int, what: str) -> list[str]:
    parts = [p.strip() for p in text.split(";")]
    if len(parts) != n:
        raise ParseError(f"{what} needs {n} ';'-separated expressions, got {len(parts)}")
    return [p.split("=", 1)[1] if "=" in p else p for p in parts]


def parse_map(text: str) -> SmoothMap2:
    """``"U; V"`` (or ``"u = U; v = V"``) in the variables x, y."""
    eu, ev = (parse(p, ("x", "y")) for p in _split(text, 2, "a map"))
    return SmoothMap2(lambda x, y: (eu(x, y), ev(x, y)), analytic=True, name=text.strip())


def parse_metric(text: str, variables: tuple = ("x", "y"), rect: Rect | None = None) -> Metric2:
    """``flat``, ``conformal: rho``, ``warped: sigma`` or ``general: g11; g12; g22``.

    A warped profile may use the first variable only.
    """
    rect = rect or Rect.everywhere()
    head, _, body = text.partition(":")
    kind = head.strip().lower()
    if kind == "flat" and not body.strip():
        return conformal(1.0, rect, name="flat")
    if not body.strip():
        raise ParseError(f"metric spec {text!r} needs 'kind: expressions'")
    if kind == "conformal":
        return conformal(scalar_field(body, variables), rect, name=text.strip())
    if kind == "warped":
        e = parse(body, variables[:1])
        return warped(e, rect, name=text.strip())
    if kind == "general":
        g11, g12, g22 = (scalar_field(p, variables) for p in _split(body, 3, "a general metric"))
        return general(g11, g12, g22, rect, name=text.strip())
    raise ParseError(f"unknown metric kind {kind!r}; use flat, conformal, warped or general")
