"""Small symbolic expression language over named real variables.

Everything downstream (metrics, frames, connection coefficients) is built
from these trees so that derivatives are exact rather than finite-differenced.
The language is deliberately tiny:

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , unary ] ;
    atom    = number | name | func , "(" , expr , ")" | "(" , expr , ")" ;
    func    = "sin" | "cos" | "exp" | "sqrt" | "ln" ;

"^" is right-associative and binds tighter than unary minus.  Values are
real floats only; complex scalars never enter a tree (they are applied to
evaluated results downstream).  Nodes are immutable, so sharing subtrees
between threads is safe.

Construction goes through the module-level helpers (add, mul, ...) or the
overloaded operators, which fold constants and absorb structural zeros and
ones (0*x -> 0, x+0 -> x, x^1 -> x).  No algebraic rewriting beyond that.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

from .errors import (
    EvalDomainError,
    ExprParseError,
    UnboundVariableError,
    UnknownIdentifierError,
)

# Deep trees appear after repeated differentiation of quotient rules; both
# compilation and printing recurse over them.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Binding = Mapping[str, float]
ExprLike = Union["Expr", float, int]

_UNARY_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "ln": math.log,
}

# Printing precedence levels; higher binds tighter.
_P_ADD, _P_MUL, _P_NEG, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base node.  Subclasses: Const, Var, Neg, Call, BinOp."""

    __slots__ = ("free_vars", "_fn")

    def eval(self, binding: Binding) -> float:
        return evaluate(self, binding)

    def diff(self, name: str) -> "Expr":
        return diff(self, name)

    def subst(self, mapping: Mapping[str, ExprLike]) -> "Expr":
        return subst(self, mapping)

    def __str__(self) -> str:
        return _render(self, 0)

    def __repr__(self) -> str:
        return f"Expr({_render(self, 0)!r})"

    # Arithmetic sugar; every path funnels into the smart constructors.
    def __add__(self, other: ExprLike) -> "Expr":
        return add(self, as_expr(other))

    def __radd__(self, other: ExprLike) -> "Expr":
        return add(as_expr(other), self)

    def __sub__(self, other: ExprLike) -> "Expr":
        return sub(self, as_expr(other))

    def __rsub__(self, other: ExprLike) -> "Expr":
        return sub(as_expr(other), self)

    def __mul__(self, other: ExprLike) -> "Expr":
        return mul(self, as_expr(other))

    def __rmul__(self, other: ExprLike) -> "Expr":
        return mul(as_expr(other), self)

    def __truediv__(self, other: ExprLike) -> "Expr":
        return div(self, as_expr(other))

    def __rtruediv__(self, other: ExprLike) -> "Expr":
        return div(as_expr(other), self)

    def __pow__(self, other: ExprLike) -> "Expr":
        return pow_(self, as_expr(other))

    def __neg__(self) -> "Expr":
        return neg(self)


def _init_node(node: Expr, free: frozenset[str]) -> None:
    # Nodes are frozen dataclasses; stash the derived attributes directly.
    object.__setattr__(node, "free_vars", free)
    object.__setattr__(node, "_fn", None)


@dataclass(frozen=True, eq=False, repr=False)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        _init_node(self, frozenset())


@dataclass(frozen=True, eq=False, repr=False)
class Var(Expr):
    name: str

    def __post_init__(self):
        _init_node(self, frozenset((self.name,)))


@dataclass(frozen=True, eq=False, repr=False)
class Neg(Expr):
    arg: Expr

    def __post_init__(self):
        _init_node(self, self.arg.free_vars)


@dataclass(frozen=True, eq=False, repr=False)
class Call(Expr):
    fn: str
    arg: Expr

    def __post_init__(self):
        _init_node(self, self.arg.free_vars)


@dataclass(frozen=True, eq=False, repr=False)
class BinOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr

    def __post_init__(self):
        _init_node(self, self.left.free_vars | self.right.free_vars)


ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)):
        return Const(float(x))
    raise TypeError(f"cannot interpret {x!r} as an expression")


def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


# ---------------------------------------------------------------------------
# Smart constructors


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    return BinOp("/", a, b)


def pow_(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            return Const(math.pow(a.value, b.value))
        except (ValueError, OverflowError):
            pass  # keep symbolic; the error surfaces at eval time
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return ONE
    return BinOp("^", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def call(fn: str, arg: Expr) -> Expr:
    if fn not in _UNARY_FUNCS:
        raise ValueError(f"unknown function {fn!r}")
    if isinstance(arg, Const):
        try:
            return Const(_UNARY_FUNCS[fn](arg.value))
        except (ValueError, OverflowError):
            pass
    return Call(fn, arg)


def sin(a: ExprLike) -> Expr:
    return call("sin", as_expr(a))


def cos(a: ExprLike) -> Expr:
    return call("cos", as_expr(a))


def exp(a: ExprLike) -> Expr:
    return call("exp", as_expr(a))


def sqrt(a: ExprLike) -> Expr:
    return call("sqrt", as_expr(a))


def ln(a: ExprLike) -> Expr:
    return call("ln", as_expr(a))


def sinh(a: ExprLike) -> Expr:
    """Composite helper: sinh is not a primitive, but (exp(x)-exp(-x))/2 is."""
    e = as_expr(a)
    return div(sub(exp(e), exp(neg(e))), Const(2.0))


def cosh(a: ExprLike) -> Expr:
    e = as_expr(a)
    return div(add(exp(e), exp(neg(e))), Const(2.0))


# ---------------------------------------------------------------------------
# Evaluation


def _pow_real(u: float, v: float) -> float:
    try:
        return math.pow(u, v)
    except ValueError:
        raise EvalDomainError(f"{u!r} ^ {v!r} is not real") from None
    except OverflowError:
        raise EvalDomainError(f"{u!r} ^ {v!r} overflows") from None


# Tape opcodes.  Expressions built by diff/Christoffel contraction are DAGs
# with massive subtree sharing (observed fan-ins of 30-400x), so evaluation
# linearizes the *distinct* nodes once and replays a flat instruction list
# instead of walking the unfolded tree.
_OP_VAR, _OP_NEG, _OP_ADD, _OP_SUB, _OP_MUL, _OP_DIV, _OP_POW, _OP_CALL = range(8)

_BINOPS = {"+": _OP_ADD, "-": _OP_SUB, "*": _OP_MUL, "/": _OP_DIV, "^": _OP_POW}


def _linearize(root: Expr) -> list[Expr]:
    """Distinct nodes of the DAG in dependency order (children first)."""
    order: list[Expr] = []
    done: set[int] = set()
    stack: list[tuple[Expr, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        if expanded:
            done.add(id(node))
            order.append(node)
            continue
        stack.append((node, True))
        if isinstance(node, (Neg, Call)):
            stack.append((node.arg, False))
        elif isinstance(node, BinOp):
            stack.append((node.right, False))
            stack.append((node.left, False))
    return order


def _compile(e: Expr) -> Callable[[Binding], float]:
    order = _linearize(e)
    slot = {id(n): i for i, n in enumerate(order)}
    base = [0.0] * len(order)
    prog: list[tuple] = []
    for i, n in enumerate(order):
        if isinstance(n, Const):
            base[i] = n.value  # folded into the value template, no instruction
        elif isinstance(n, Var):
            prog.append((_OP_VAR, i, n.name, None))
        elif isinstance(n, Neg):
            prog.append((_OP_NEG, i, slot[id(n.arg)], None))
        elif isinstance(n, Call):
            prog.append((_OP_CALL, i, slot[id(n.arg)], (_UNARY_FUNCS[n.fn], n.fn)))
        else:
            assert isinstance(n, BinOp)
            prog.append((_BINOPS[n.op], i, slot[id(n.left)], slot[id(n.right)]))

    def run(b, _prog=prog, _base=base):
        vals = _base[:]
        for op, dst, a, c in _prog:
            if op == _OP_MUL:
                vals[dst] = vals[a] * vals[c]
            elif op == _OP_ADD:
                vals[dst] = vals[a] + vals[c]
            elif op == _OP_SUB:
                vals[dst] = vals[a] - vals[c]
            elif op == _OP_VAR:
                vals[dst] = b[a]
            elif op == _OP_NEG:
                vals[dst] = -vals[a]
            elif op == _OP_DIV:
                d = vals[c]
                if d == 0.0:
                    raise EvalDomainError("division by zero")
                vals[dst] = vals[a] / d
            elif op == _OP_POW:
                vals[dst] = _pow_real(vals[a], vals[c])
            else:
                g, fn = c
                x = vals[a]
                try:
                    vals[dst] = g(x)
                except ValueError:
                    raise EvalDomainError(f"{fn}({x!r}) is not real") from None
                except OverflowError:
                    raise EvalDomainError(f"{fn}({x!r}) overflows") from None
        return vals[-1]

    return run


def _cached(e: Expr) -> Callable[[Binding], float]:
    fn = e._fn
    if fn is None:
        fn = _compile(e)
        object.__setattr__(e, "_fn", fn)
    return fn


def evaluate(e: Expr, binding: Binding) -> float:
    """Evaluate e at the given variable binding.

    Raises UnboundVariableError when a free variable is missing and
    EvalDomainError when the value leaves the reals.
    """
    missing = e.free_vars - binding.keys()
    if missing:
        raise UnboundVariableError(
            f"no value bound for variable(s) {', '.join(sorted(missing))}"
        )
    return _cached(e)(binding)


# ---------------------------------------------------------------------------
# Differentiation


def diff(e: Expr, name: str) -> Expr:
    """Exact partial derivative with respect to the named variable."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == name else ZERO
    if name not in e.free_vars:
        return ZERO
    if isinstance(e, Neg):
        return neg(diff(e.arg, name))
    if isinstance(e, Call):
        du = diff(e.arg, name)
        u = e.arg
        if e.fn == "sin":
            return mul(cos(u), du)
        if e.fn == "cos":
            return neg(mul(sin(u), du))
        if e.fn == "exp":
            return mul(exp(u), du)
        if e.fn == "sqrt":
            return div(du, mul(Const(2.0), sqrt(u)))
        if e.fn == "ln":
            return div(du, u)
        raise AssertionError(e.fn)
    assert isinstance(e, BinOp)
    a, b = e.left, e.right
    if e.op == "+":
        return add(diff(a, name), diff(b, name))
    if e.op == "-":
        return sub(diff(a, name), diff(b, name))
    if e.op == "*":
        return add(mul(diff(a, name), b), mul(a, diff(b, name)))
    if e.op == "/":
        num = sub(mul(diff(a, name), b), mul(a, diff(b, name)))
        return div(num, pow_(b, Const(2.0)))
    if e.op == "^":
        if isinstance(b, Const):
            # d(u^c) = c * u^(c-1) * u'; avoids ln(u) for negative bases
            return mul(mul(b, pow_(a, Const(b.value - 1.0))), diff(a, name))
        # general case d(u^v) = u^v * (v' ln u + v u'/u)
        term = add(mul(diff(b, name), ln(a)), div(mul(b, diff(a, name)), a))
        return mul(pow_(a, b), term)
    raise AssertionError(e.op)


def subst(e: Expr, mapping: Mapping[str, ExprLike]) -> Expr:
    """Replace variables by expressions or numbers, resimplifying as we go."""
    if not (e.free_vars & mapping.keys()):
        return e
    if isinstance(e, Var):
        return as_expr(mapping[e.name]) if e.name in mapping else e
    if isinstance(e, Neg):
        return neg(subst(e.arg, mapping))
    if isinstance(e, Call):
        return call(e.fn, subst(e.arg, mapping))
    assert isinstance(e, BinOp)
    a, b = subst(e.left, mapping), subst(e.right, mapping)
    return {"+": add, "-": sub, "*": mul, "/": div, "^": pow_}[e.op](a, b)


# ---------------------------------------------------------------------------
# Printing


def _render(e: Expr, parent_prec: int) -> str:
    if isinstance(e, Const):
        v = e.value
        if v >= 0.0 or math.isnan(v):
            text = repr(v)
            if text.endswith(".0"):
                text = text[:-2]
            prec = _P_ATOM
        else:
            # negative constants print like a unary minus application
            inner = repr(-v)
            if inner.endswith(".0"):
                inner = inner[:-2]
            text, prec = "-" + inner, _P_NEG
    elif isinstance(e, Var):
        text, prec = e.name, _P_ATOM
    elif isinstance(e, Neg):
        text, prec = "-" + _render(e.arg, _P_NEG + 1), _P_NEG
    elif isinstance(e, Call):
        text, prec = f"{e.fn}({_render(e.arg, 0)})", _P_ATOM
    else:
        assert isinstance(e, BinOp)
        if e.op in "+-":
            prec = _P_ADD
            text = f"{_render(e.left, prec)} {e.op} {_render(e.right, prec + 1)}"
        elif e.op in "*/":
            prec = _P_MUL
            text = f"{_render(e.left, prec)}{e.op}{_render(e.right, prec + 1)}"
        else:
            prec = _P_POW
            text = f"{_render(e.left, prec + 1)}^{_render(e.right, prec)}"
    if prec < parent_prec:
        return f"({text})"
    return text


def to_string(e: Expr) -> str:
    return _render(e, 0)


# ---------------------------------------------------------------------------
# Parsing

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")
_DIGITS = set("0123456789")


class _Parser:
    def __init__(self, text: str, variables: Iterable[str] | None):
        self.text = text
        self.pos = 0
        self.variables = None if variables is None else frozenset(variables)

    def error(self, message: str, pos: int | None = None) -> ExprParseError:
        return ExprParseError(message, self.pos if pos is None else pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.parse_expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.peek()!r}")
        return e

    def parse_expr(self) -> Expr:
        e = self.parse_term()
        while True:
            self.skip_ws()
            c = self.peek()
            if c == "+":
                self.pos += 1
                e = add(e, self.parse_term())
            elif c == "-":
                self.pos += 1
                e = sub(e, self.parse_term())
            else:
                return e

    def parse_term(self) -> Expr:
        e = self.parse_unary()
        while True:
            self.skip_ws()
            c = self.peek()
            if c == "*":
                self.pos += 1
                e = mul(e, self.parse_unary())
            elif c == "/":
                self.pos += 1
                e = div(e, self.parse_unary())
            else:
                return e

    def parse_unary(self) -> Expr:
        self.skip_ws()
        if self.peek() == "-":
            self.pos += 1
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        self.skip_ws()
        if self.peek() == "^":
            self.pos += 1
            return pow_(base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        self.skip_ws()
        c = self.peek()
        if c == "(":
            self.pos += 1
            e = self.parse_expr()
            self.skip_ws()
            self.expect(")")
            return e
        if c in _DIGITS:
            return self.parse_number()
        if c in _IDENT_START:
            return self.parse_name()
        if c == "":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {c!r}")

    def parse_number(self) -> Expr:
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos] in _DIGITS:
            self.pos += 1
        if self.peek() == ".":
            self.pos += 1
            while self.pos < len(text) and text[self.pos] in _DIGITS:
                self.pos += 1
        if self.peek() in ("e", "E"):
            mark = self.pos
            self.pos += 1
            if self.peek() in ("+", "-"):
                self.pos += 1
            if self.peek() in _DIGITS:
                while self.pos < len(text) and text[self.pos] in _DIGITS:
                    self.pos += 1
            else:
                self.pos = mark  # "2e" was really "2 * e"? no: reject below
        lexeme = text[start:self.pos]
        try:
            return Const(float(lexeme))
        except ValueError:
            raise self.error(f"bad number {lexeme!r}", start) from None

    def parse_name(self) -> Expr:
        start = self.pos
        text = self.text
        while self.pos < len(text) and text[self.pos] in _IDENT_CONT:
            self.pos += 1
        name = text[start:self.pos]
        self.skip_ws()
        if self.peek() == "(":
            if name not in _UNARY_FUNCS:
                raise UnknownIdentifierError(f"unknown function {name!r}", start)
            self.pos += 1
            arg = self.parse_expr()
            self.skip_ws()
            self.expect(")")
            return call(name, arg)
        if name in _UNARY_FUNCS:
            raise self.error(f"function {name!r} needs an argument list", start)
        if self.variables is not None and name not in self.variables:
            raise UnknownIdentifierError(f"unknown identifier {name!r}", start)
        return Var(name)


def parse(text: str, variables: Iterable[str] | None = None) -> Expr:
    """Parse an infix expression string.

    When `variables` is given, identifiers outside that set raise
    UnknownIdentifierError; otherwise any identifier becomes a variable.
    """
    return _Parser(text, variables).parse()
