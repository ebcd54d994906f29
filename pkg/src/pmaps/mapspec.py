"""Plain-text map specifications.

Grammar (one field per line, ``#`` starts a comment)::

    spec      := { line }
    line      := blank | comment | field
    field     := "name" "=" TEXT
               | "backend" "=" ("float" | "rational")
               | "generator" "=" GEN "(" expr { "," expr } ")"
               | "critical_points" "=" expr { "," expr }
               | "branch" "=" branch
    branch    := "affine" direction "slope" "=" expr "intercept" "=" expr
               | "general" direction "f" "=" expr-in-x
    direction := "increasing" | "decreasing"
    GEN       := "tent" | "beta" | "mod_one" | "skew_tent"

Either ``generator`` or ``critical_points`` plus one ``branch`` line per
branch must be given. Numbers are arithmetic expressions; integer and decimal
literals combined with ``+ - * / **`` stay exact rationals, anything involving
``sqrt``, ``pi`` and friends becomes a float. Affine expressions must not
contain spaces. ``f`` takes the rest of the line and may use ``x``.

Example::

    name = golden
    generator = beta((1+sqrt(5))/2)

    name = skew
    backend = rational
    critical_points = 0, 1/3, 1
    branch = affine increasing slope=3 intercept=0
    branch = affine decreasing slope=-3/2 intercept=3/2
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from pmaps import zoo
from pmaps.errors import ParseError, ValidationError
from pmaps.maps import BACKENDS, PiecewiseMonotonicMap, affine, general

_FUNCS = {
    "sqrt": math.sqrt,
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "asin": math.asin,
    "acos": math.acos,
    "atan": math.atan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "abs": abs,
}
_CONSTS = {"pi": math.pi, "e": math.e, "phi": (1 + math.sqrt(5)) / 2}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_UNOPS = (ast.UAdd, ast.USub)


def _check_tree(tree, allow_x):
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load) + _BINOPS + _UNOPS):
            continue
        if isinstance(node, (ast.BinOp, ast.UnaryOp)):
            continue
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            continue
        if isinstance(node, ast.Name):
            if node.id in _CONSTS or node.id in _FUNCS or (allow_x and node.id == "x"):
                continue
            raise ValueError(f"unknown name {node.id!r}")
        if isinstance(node, ast.Call):
            if isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
                continue
            raise ValueError("only calls to elementary functions are allowed")
        raise ValueError(f"unsupported syntax {type(node).__name__}")


def _eval_const(node, src):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int):
            return Fraction(node.value)
        return Fraction(ast.get_source_segment(src, node))
    if isinstance(node, ast.Name):
        return _CONSTS[node.id]
    if isinstance(node, ast.UnaryOp):
        v = _eval_const(node.operand, src)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a, b = _eval_const(node.left, src), _eval_const(node.right, src)
        op = node.op
        if isinstance(op, ast.Add):
            return a + b
        if isinstance(op, ast.Sub):
            return a - b
        if isinstance(op, ast.Mult):
            return a * b
        if isinstance(op, ast.Div):
            return a / b
        if isinstance(b, Fraction) and b.denominator == 1:
            return a ** int(b)
        return float(a) ** float(b)
    if isinstance(node, ast.Call):
        return float(_FUNCS[node.func.id](*(float(_eval_const(a, src)) for a in node.args)))
    raise ValueError("bad expression")


def parse_number(src: str):
    """Evaluate a constant expression; exact Fraction when it is rational arithmetic."""
    try:
        tree = ast.parse(src.strip(), mode="eval")
        _check_tree(tree, allow_x=False)
        return _eval_const(tree.body, src.strip())
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError, OverflowError) as exc:
        raise ValueError(f"cannot evaluate {src!r}: {exc}") from None


class Expr:
    """A float function of ``x`` given as an expression; picklable by source."""

    def __init__(self, source: str):
        self.source = source.strip()
        tree = ast.parse(self.source, mode="eval")
        _check_tree(tree, allow_x=True)
        self._code = compile(tree, "<mapspec>", "eval")
        self._ns = {"__builtins__": {}, **_FUNCS, **_CONSTS}

    def __call__(self, x):
        ns = self._ns
        ns["x"] = float(x)
        return float(eval(self._code, ns))

    def __reduce__(self):
        return (Expr, (self.source,))

    def __repr__(self):
        return f"Expr({self.source!r})"


@dataclass
class BranchRecord:
    kind: str
    increasing: bool
    slope: object = None
    intercept: object = None
    f: str | None = None


@dataclass
class MapSpec:
    name: str | None = None
    backend: str = "float"
    generator: tuple | None = None  # (name, args)
    critical_points: list | None = None
    branches: list = field(default_factory=list)


_AFFINE_ATTR = re.compile(r"(\w+)\s*=\s*(\S+)")


def _parse_branch(value, lineno):
    parts = value.split(None, 2)
    if len(parts) < 2:
        raise ParseError("expected '<kind> <direction> ...'", lineno, "branch")
    kind, direction = parts[0], parts[1]
    rest = parts[2] if len(parts) > 2 else ""
    if direction not in ("increasing", "decreasing"):
        raise ParseError(f"direction must be increasing or decreasing, got {direction!r}", lineno, "branch")
    inc = direction == "increasing"
    if kind == "affine":
        attrs = dict(_AFFINE_ATTR.findall(rest))
        leftover = _AFFINE_ATTR.sub("", rest).strip()
        if leftover or set(attrs) != {"slope", "intercept"}:
            raise ParseError("affine branch needs exactly slope=<expr> intercept=<expr>", lineno, "branch")
        try:
            return BranchRecord(kind, inc, parse_number(attrs["slope"]), parse_number(attrs["intercept"]))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, "branch") from None
    if kind == "general":
        m = re.fullmatch(r"f\s*=\s*(.+)", rest.strip())
        if not m:
            raise ParseError("general branch needs f=<expression in x>", lineno, "branch")
        try:
            Expr(m.group(1))
        except (SyntaxError, ValueError) as exc:
            raise ParseError(f"bad expression: {exc}", lineno, "branch") from None
        return BranchRecord(kind, inc, f=m.group(1).strip())
    raise ParseError(f"unknown branch kind {kind!r}", lineno, "branch")


def _parse_generator(value, lineno):
    try:
        tree = ast.parse(value.strip(), mode="eval").body
    except SyntaxError:
        raise ParseError(f"cannot parse generator {value!r}", lineno, "generator") from None
    if not (isinstance(tree, ast.Call) and isinstance(tree.func, ast.Name)):
        raise ParseError("generator must look like name(arg, ...)", lineno, "generator")
    gname = tree.func.id
    if gname not in zoo.GENERATORS:
        raise ParseError(
            f"unknown generator {gname!r}; known: {', '.join(sorted(zoo.GENERATORS))}", lineno, "generator"
        )
    src = value.strip()
    try:
        args = [parse_number(ast.get_source_segment(src, a)) for a in tree.args]
    except ValueError as exc:
        raise ParseError(str(exc), lineno, "generator") from None
    return gname, args


def parse_map_spec(text: str) -> MapSpec:
    spec = MapSpec()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key != "branch" and key in seen:
            raise ParseError("duplicate field", lineno, key)
        seen.add(key)
        if key == "name":
            spec.name = value
        elif key == "backend":
            if value not in BACKENDS:
                raise ParseError(f"backend must be one of {BACKENDS}", lineno, key)
            spec.backend = value
        elif key == "generator":
            spec.generator = _parse_generator(value, lineno)
        elif key == "critical_points":
            try:
                spec.critical_points = [parse_number(v) for v in value.split(",")]
            except ValueError as exc:
                raise ParseError(str(exc), lineno, key) from None
        elif key == "branch":
            spec.branches.append(_parse_branch(value, lineno))
        else:
            raise ParseError(f"unknown field {key!r}", lineno, key)
    if spec.generator is not None:
        if spec.critical_points is not None or spec.branches:
            raise ParseError("give either generator or critical_points/branch lines, not both")
    elif spec.critical_points is None or not spec.branches:
        raise ParseError("need a generator or critical_points plus branch lines")
    return spec


def build_map(spec: MapSpec, backend: str | None = None) -> PiecewiseMonotonicMap:
    backend = backend or spec.backend
    if spec.generator is not None:
        gname, args = spec.generator
        try:
            return zoo.GENERATORS[gname](*args, backend=backend, name=spec.name or gname)
        except TypeError as exc:
            raise ValidationError(f"generator {gname}: {exc}") from None
    branches = []
    for rec in spec.branches:
        if rec.kind == "affine":
            if rec.slope == 0:
                raise ValidationError("affine branch slope must be nonzero")
            if (rec.slope > 0) != rec.increasing:
                raise ValidationError(
                    f"affine branch with slope {rec.slope} is not {'in' if rec.increasing else 'de'}creasing"
                )
            branches.append(affine(rec.slope, rec.intercept))
        else:
            branches.append(general(Expr(rec.f), rec.increasing))
    return PiecewiseMonotonicMap(spec.critical_points, branches, backend=backend, name=spec.name)


def load_map_spec(text: str, backend: str | None = None) -> PiecewiseMonotonicMap:
    """Parse map-spec text and build the validated map."""
    return build_map(parse_map_spec(text), backend)
