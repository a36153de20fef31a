"""
🧩 Scalar Expressions
====================

Small expression trees over the coordinates x0..x(n-1) and the family
parameter t, backed by sympy. Expressions load from a JSON tree or a string,
differentiate exactly, and compile to numpy callables.

JSON tree forms::

    3.5                         constant
    {"const": 3.5}              constant
    {"coord": 0}                coordinate x0
    {"t": true} or "t"          family parameter
    {"op": "mul", "args": [..]} op in add, sub, mul, div, pow, neg,
                                sin, cos, sinh, cosh, exp
    "x0**2 + sin(t)"            string, parsed with the same vocabulary
"""

from functools import lru_cache
from numbers import Number
from typing import Any, Callable, Dict, List, Sequence, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr

from utils.errors import SchemaError

T = sympy.Symbol("t", real=True)

_UNARY = {"sin": sympy.sin, "cos": sympy.cos, "sinh": sympy.sinh,
          "cosh": sympy.cosh, "exp": sympy.exp}
_FUNCTIONS = tuple(_UNARY.values())


def coord_symbol(i: int) -> sympy.Symbol:
    return sympy.Symbol(f"x{i}", real=True)


def _allowed_names(max_dim: int = 16) -> Dict[str, Any]:
    names: Dict[str, Any] = {"t": T, "pi": sympy.pi, "E": sympy.E}
    names.update(_UNARY)
    names.update({f"x{i}": coord_symbol(i) for i in range(max_dim)})
    return names


class ScalarExpr:
    """Immutable wrapper around a sympy expression in t and coordinates"""

    __slots__ = ("expr",)

    def __init__(self, expr: Any):
        object.__setattr__(self, "expr", sympy.sympify(expr))
        self._validate()

    def __setattr__(self, key, value):
        raise AttributeError("ScalarExpr is immutable")

    def _validate(self) -> None:
        for node in sympy.preorder_traversal(self.expr):
            if isinstance(node, sympy.Symbol):
                if node != T and not node.name.startswith("x"):
                    raise SchemaError(f"unknown symbol {node}")
            elif isinstance(node, sympy.Function) and not isinstance(node, _FUNCTIONS):
                raise SchemaError(f"unsupported function {node.func}")

    # construction

    @classmethod
    def from_json(cls, obj: Any) -> "ScalarExpr":
        return cls(_tree_to_sympy(obj))

    @classmethod
    def parse(cls, text: str) -> "ScalarExpr":
        try:
            expr = parse_expr(text, local_dict=_allowed_names(), evaluate=True)
        except Exception as e:
            raise SchemaError(f"cannot parse expression {text!r}: {e}") from e
        return cls(expr)

    @classmethod
    def coerce(cls, obj: Union["ScalarExpr", Number, str, dict]) -> "ScalarExpr":
        if isinstance(obj, ScalarExpr):
            return obj
        if isinstance(obj, str) and obj != "t":
            return cls.parse(obj)
        return cls.from_json(obj)

    def to_json(self) -> Any:
        return _sympy_to_tree(self.expr)

    # calculus

    def diff_t(self, order: int = 1) -> "ScalarExpr":
        return ScalarExpr(sympy.diff(self.expr, T, order))

    def diff_coord(self, i: int) -> "ScalarExpr":
        return ScalarExpr(sympy.diff(self.expr, coord_symbol(i)))

    def subs_t(self, value: float) -> "ScalarExpr":
        return ScalarExpr(self.expr.subs(T, value))

    def depends_on_t(self) -> bool:
        return T in self.expr.free_symbols

    def evaluate(self, x: Sequence[float], t: float = 0.0) -> float:
        fn = compile_scalar(self, len(x))
        return float(fn(t, *x))

    # arithmetic

    def _wrap(self, other: Any) -> sympy.Expr:
        return other.expr if isinstance(other, ScalarExpr) else sympy.sympify(other)

    def __add__(self, other): return ScalarExpr(self.expr + self._wrap(other))
    def __radd__(self, other): return ScalarExpr(self._wrap(other) + self.expr)
    def __sub__(self, other): return ScalarExpr(self.expr - self._wrap(other))
    def __rsub__(self, other): return ScalarExpr(self._wrap(other) - self.expr)
    def __mul__(self, other): return ScalarExpr(self.expr * self._wrap(other))
    def __rmul__(self, other): return ScalarExpr(self._wrap(other) * self.expr)
    def __truediv__(self, other): return ScalarExpr(self.expr / self._wrap(other))
    def __rtruediv__(self, other): return ScalarExpr(self._wrap(other) / self.expr)
    def __pow__(self, other): return ScalarExpr(self.expr ** self._wrap(other))
    def __neg__(self): return ScalarExpr(-self.expr)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScalarExpr) and sympy.simplify(self.expr - other.expr) == 0

    def __hash__(self) -> int:
        return hash(sympy.srepr(self.expr))

    def __repr__(self) -> str:
        return f"ScalarExpr({self.expr})"


def const(value: float) -> ScalarExpr:
    return ScalarExpr(value)


def coord(i: int) -> ScalarExpr:
    return ScalarExpr(coord_symbol(i))


def tparam() -> ScalarExpr:
    return ScalarExpr(T)


def sin(e: Any) -> ScalarExpr: return ScalarExpr(sympy.sin(ScalarExpr.coerce(e).expr))
def cos(e: Any) -> ScalarExpr: return ScalarExpr(sympy.cos(ScalarExpr.coerce(e).expr))
def sinh(e: Any) -> ScalarExpr: return ScalarExpr(sympy.sinh(ScalarExpr.coerce(e).expr))
def cosh(e: Any) -> ScalarExpr: return ScalarExpr(sympy.cosh(ScalarExpr.coerce(e).expr))
def exp(e: Any) -> ScalarExpr: return ScalarExpr(sympy.exp(ScalarExpr.coerce(e).expr))


def _tree_to_sympy(obj: Any) -> sympy.Expr:
    if isinstance(obj, bool):
        raise SchemaError("booleans are not expressions")
    if isinstance(obj, Number):
        return sympy.sympify(obj)
    if isinstance(obj, str):
        if obj == "t":
            return T
        return ScalarExpr.parse(obj).expr
    if not isinstance(obj, dict):
        raise SchemaError(f"cannot read expression node {obj!r}")
    if "const" in obj:
        return sympy.sympify(obj["const"])
    if "coord" in obj:
        return coord_symbol(int(obj["coord"]))
    if obj.get("t"):
        return T
    op = obj.get("op")
    args = [_tree_to_sympy(a) for a in obj.get("args", [])]
    if op == "add":
        return sympy.Add(*args)
    if op == "mul":
        return sympy.Mul(*args)
    if op == "sub" and len(args) == 2:
        return args[0] - args[1]
    if op == "div" and len(args) == 2:
        return args[0] / args[1]
    if op == "pow" and len(args) == 2:
        return args[0] ** args[1]
    if op == "neg" and len(args) == 1:
        return -args[0]
    if op in _UNARY and len(args) == 1:
        return _UNARY[op](args[0])
    raise SchemaError(f"unknown expression op {op!r} with {len(args)} arguments")


def _sympy_to_tree(expr: sympy.Expr) -> Any:
    if expr == T:
        return {"t": True}
    if isinstance(expr, sympy.Symbol):
        return {"coord": int(expr.name[1:])}
    if expr.is_Number:
        return {"const": float(expr)}
    if isinstance(expr, sympy.Add):
        return {"op": "add", "args": [_sympy_to_tree(a) for a in expr.args]}
    if isinstance(expr, sympy.Mul):
        return {"op": "mul", "args": [_sympy_to_tree(a) for a in expr.args]}
    if isinstance(expr, sympy.Pow):
        return {"op": "pow", "args": [_sympy_to_tree(a) for a in expr.args]}
    for name, fn in _UNARY.items():
        if isinstance(expr, fn):
            return {"op": name, "args": [_sympy_to_tree(expr.args[0])]}
    if expr in (sympy.pi, sympy.E):
        return {"const": float(expr)}
    raise SchemaError(f"cannot serialize {expr}")


# least recently used callables are dropped past this many distinct expressions
COMPILE_CACHE_SIZE = 1024


@lru_cache(maxsize=COMPILE_CACHE_SIZE)
def lambdified(expr: sympy.Basic, dim: int) -> Callable:
    """sympy.lambdify over (t, x0, ..., x(dim-1)), shared by structurally equal expressions"""
    return sympy.lambdify([T] + [coord_symbol(i) for i in range(dim)], expr, modules="numpy")


def compile_scalar(e: ScalarExpr, dim: int) -> Callable:
    """Numpy callable f(t, x0, ..., x(dim-1))"""
    return lambdified(e.expr, dim)


def compile_matrix(entries: Sequence[Sequence[ScalarExpr]], dim: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Compile a square or rectangular grid of expressions into
    ``f(t, x) -> ndarray`` with a single lambdified call.
    """
    rows = [[ScalarExpr.coerce(e).expr for e in row] for row in entries]
    fn = lambdified(sympy.ImmutableMatrix(rows), dim)

    def evaluate(t: float, x: np.ndarray) -> np.ndarray:
        return np.array(fn(t, *np.asarray(x, dtype=float)), dtype=float)

    return evaluate


def compile_vector(entries: Sequence[ScalarExpr], dim: int) -> Callable[[float, np.ndarray], np.ndarray]:
    inner = compile_matrix([list(entries)], dim)
    return lambda t, x: inner(t, x)[0]


def expr_grid(entries: Sequence[Sequence[Any]]) -> List[List[ScalarExpr]]:
    """Coerce a nested list of JSON/str/number nodes to ScalarExpr"""
    return [[ScalarExpr.coerce(e) for e in row] for row in entries]
