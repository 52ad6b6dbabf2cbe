"""Scalar expression trees with exact first and second derivatives.

This module parses textual formulas such as ``"$d*cos(y)*sin(y)"`` into
immutable trees and evaluates them as order-2 jets (value, d/dy, d2/dy2)
by forward-mode propagation.  Parameters (``$name``) are substituted at
parse time, so a parsed tree is a pure function of its variables.

Trees are ordinarily functions of the single variable ``y``; dissipation
gains may additionally use ``x`` (see :func:`parse`), in which case only
plain evaluation is available, not jets.

Grammar (EBNF, also reproduced in the README)::

    expr    = term { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = "-" factor | power ;
    power   = atom [ "^" factor ] ;
    atom    = NUMBER | VARIABLE | "$" NAME | NAME "(" expr ")" | "(" expr ")" ;

``^`` binds tighter than unary minus and its exponent must reduce to a
constant once parameters are substituted (this keeps jets total).  Known
functions: sin, cos, tan, exp, log, sqrt.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import EvalDomainError, ExprSyntaxError, UnboundParameterError

__all__ = [
    "Expr", "Const", "Var", "Neg", "Call", "Bin", "Pow",
    "Jet2", "parse", "to_text", "eval2", "eval_value", "diff",
    "const", "var", "neg", "add", "sub", "mul", "div", "powc", "call",
    "FUNCTIONS",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")


# --------------------------------------------------------------------------
# nodes

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "y" or "x"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * /
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float  # constant by construction


Expr = Const | Var | Neg | Call | Bin | Pow


# Smart constructors.  The only rewrite rule applied anywhere is folding a
# negated literal into a negative constant; it makes printing and re-parsing
# agree structurally ("-3" parses to Const(-3), never Neg(Const(3))).

def const(v: float) -> Const:
    return Const(float(v))


def var(name: str = "y") -> Var:
    return Var(name)


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    return Neg(e)


def add(a: Expr, b: Expr) -> Bin:
    return Bin("+", a, b)


def sub(a: Expr, b: Expr) -> Bin:
    return Bin("-", a, b)


def mul(a: Expr, b: Expr) -> Bin:
    return Bin("*", a, b)


def div(a: Expr, b: Expr) -> Bin:
    return Bin("/", a, b)


def powc(base: Expr, exponent: float) -> Pow:
    return Pow(base, float(exponent))


def call(fn: str, arg: Expr) -> Call:
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    return Call(fn, arg)


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<param>\$[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            at = len(source) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {source[at]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens, params, variables):
        self.tokens = tokens
        self.i = 0
        self.params = params
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"got {text or 'end of input'!r}", pos, expected=repr(op))
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.parse_term()
                node = Bin(text, node, rhs)
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.parse_factor()
                node = Bin(text, node, rhs)
            else:
                return node

    def parse_factor(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            expo_pos = self.peek()[2]
            expo = self.parse_factor()
            if not isinstance(expo, Const):
                raise ExprSyntaxError(
                    "exponent must be a constant after parameter substitution",
                    expo_pos,
                )
            return Pow(base, expo.value)
        return base

    def parse_atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "param":
            name = text[1:]
            if name not in self.params:
                raise UnboundParameterError(name)
            return Const(float(self.params[name]))
        if kind == "name":
            if text in self.variables:
                return Var(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ExprSyntaxError(
                f"unknown identifier {text!r}",
                pos,
                expected="a variable (" + ", ".join(sorted(self.variables)) + ") or function",
            )
        if kind == "op" and text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"got {text or 'end of input'!r}", pos, expected="a value"
        )


def parse(source: str, params: dict[str, float] | None = None,
          variables: tuple[str, ...] = ("y",)) -> Expr:
    """Parse expression text, substituting every ``$name`` from *params*.

    Raises ExprSyntaxError or UnboundParameterError.
    """
    parser = _Parser(_tokenize(source), params or {}, variables)
    node = parser.parse_expr()
    kind, text, pos = parser.peek()
    if kind != "eof":
        raise ExprSyntaxError(f"trailing input {text!r}", pos, expected="end of input")
    return node


# --------------------------------------------------------------------------
# printing

def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Fully parenthesized canonical text; parse(to_text(e)) == e."""
    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Bin):
        return f"({to_text(e.lhs)}{e.op}{to_text(e.rhs)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)}^{_fmt_number(e.exponent)})"
    raise TypeError(f"not an Expr: {e!r}")


# --------------------------------------------------------------------------
# order-2 jets

@dataclass(frozen=True)
class Jet2:
    """Value plus first and second derivative with respect to y."""

    value: float
    d1: float
    d2: float

    def __add__(self, o):
        o = _as_jet(o)
        return Jet2(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __sub__(self, o):
        o = _as_jet(o)
        return Jet2(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)

    def __rsub__(self, o):
        return _as_jet(o).__sub__(self)

    def __mul__(self, o):
        o = _as_jet(o)
        return Jet2(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _as_jet(o)
        if o.value == 0.0:
            raise ZeroDivisionError("jet division by zero value")
        q = self.value / o.value
        q1 = (self.d1 - q * o.d1) / o.value
        q2 = (self.d2 - q * o.d2 - 2.0 * q1 * o.d1) / o.value
        return Jet2(q, q1, q2)

    def __rtruediv__(self, o):
        return _as_jet(o).__truediv__(self)


def _as_jet(v) -> Jet2:
    if isinstance(v, Jet2):
        return v
    return Jet2(float(v), 0.0, 0.0)


def jet_var(y: float) -> Jet2:
    return Jet2(float(y), 1.0, 0.0)


def _chain(u: Jet2, f, f1, f2) -> Jet2:
    """Jet of f(u) from f, f', f'' at u.value."""
    return Jet2(f, f1 * u.d1, f2 * u.d1 * u.d1 + f1 * u.d2)


def _jet_call(fn: str, u: Jet2, node, y) -> Jet2:
    v = u.value
    if fn == "sin":
        return _chain(u, math.sin(v), math.cos(v), -math.sin(v))
    if fn == "cos":
        return _chain(u, math.cos(v), -math.sin(v), -math.cos(v))
    if fn == "tan":
        t = math.tan(v)
        d = 1.0 + t * t
        return _chain(u, t, d, 2.0 * t * d)
    if fn == "exp":
        ex = math.exp(v)
        return _chain(u, ex, ex, ex)
    if fn == "log":
        if v <= 0.0:
            raise EvalDomainError(to_text(node), y)
        return _chain(u, math.log(v), 1.0 / v, -1.0 / (v * v))
    if fn == "sqrt":
        if v < 0.0:
            raise EvalDomainError(to_text(node), y)
        if v == 0.0:
            raise EvalDomainError(to_text(node), y)
        s = math.sqrt(v)
        return _chain(u, s, 0.5 / s, -0.25 / (s * v))
    raise ValueError(f"unknown function {fn!r}")


def _jet_pow(u: Jet2, c: float, node, y) -> Jet2:
    v = u.value
    if v == 0.0:
        if c < 0.0:
            raise EvalDomainError(to_text(node), y)
        # 0^c and its derivatives via the limit; 0**0 == 1 handles c in {0,1,2}
        f = 0.0 if c > 0.0 else 1.0
        f1 = c * v ** (c - 1.0) if c >= 1.0 else (0.0 if c == 0.0 else math.inf)
        f2 = c * (c - 1.0) * v ** (c - 2.0) if c >= 2.0 or c in (0.0, 1.0) else math.inf
        if not (math.isfinite(f1) and math.isfinite(f2)):
            raise EvalDomainError(to_text(node), y)
        return _chain(u, f, f1, f2)
    if v < 0.0 and c != int(c):
        raise EvalDomainError(to_text(node), y)
    f = v ** c
    f1 = c * v ** (c - 1.0)
    f2 = c * (c - 1.0) * v ** (c - 2.0)
    return _chain(u, f, f1, f2)


def eval2(e: Expr, y: float) -> Jet2:
    """Evaluate *e* and its first two derivatives at y (exact to rounding)."""
    if isinstance(e, Const):
        return Jet2(e.value, 0.0, 0.0)
    if isinstance(e, Var):
        if e.name != "y":
            raise EvalDomainError(f"variable {e.name!r} has no jet in y", y)
        return jet_var(y)
    if isinstance(e, Neg):
        return -eval2(e.arg, y)
    if isinstance(e, Call):
        return _jet_call(e.fn, eval2(e.arg, y), e, y)
    if isinstance(e, Bin):
        a = eval2(e.lhs, y)
        b = eval2(e.rhs, y)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b.value == 0.0:
            raise EvalDomainError(to_text(e), y)
        return a / b
    if isinstance(e, Pow):
        return _jet_pow(eval2(e.base, y), e.exponent, e, y)
    raise TypeError(f"not an Expr: {e!r}")


def eval_value(e: Expr, env: dict[str, float]) -> float:
    """Plain evaluation with a variable environment (used for f(x, y))."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return float(env[e.name])
        except KeyError:
            raise EvalDomainError(f"unbound variable {e.name!r}", env.get("y"))
    if isinstance(e, Neg):
        return -eval_value(e.arg, env)
    if isinstance(e, Call):
        v = eval_value(e.arg, env)
        if e.fn == "log" and v <= 0.0:
            raise EvalDomainError(to_text(e), env.get("y"))
        if e.fn == "sqrt" and v < 0.0:
            raise EvalDomainError(to_text(e), env.get("y"))
        return getattr(math, e.fn)(v)
    if isinstance(e, Bin):
        a = eval_value(e.lhs, env)
        b = eval_value(e.rhs, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise EvalDomainError(to_text(e), env.get("y"))
        return a / b
    if isinstance(e, Pow):
        b = eval_value(e.base, env)
        c = e.exponent
        if (b == 0.0 and c < 0.0) or (b < 0.0 and c != int(c)):
            raise EvalDomainError(to_text(e), env.get("y"))
        return b ** c
    raise TypeError(f"not an Expr: {e!r}")


# --------------------------------------------------------------------------
# symbolic derivative (no simplification beyond constant folding of literals)

def diff(e: Expr, wrt: str = "y") -> Expr:
    """Symbolic d/d<wrt> of a tree.  Other variables are treated as constants."""
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.name == wrt else 0.0)
    if isinstance(e, Neg):
        return neg(diff(e.arg, wrt))
    if isinstance(e, Call):
        du = diff(e.arg, wrt)
        u = e.arg
        if e.fn == "sin":
            outer = Call("cos", u)
        elif e.fn == "cos":
            outer = Neg(Call("sin", u))
        elif e.fn == "tan":
            outer = Bin("+", Const(1.0), Pow(Call("tan", u), 2.0))
        elif e.fn == "exp":
            outer = Call("exp", u)
        elif e.fn == "log":
            outer = Bin("/", Const(1.0), u)
        elif e.fn == "sqrt":
            outer = Bin("/", Const(0.5), Call("sqrt", u))
        else:
            raise ValueError(f"unknown function {e.fn!r}")
        return Bin("*", outer, du)
    if isinstance(e, Bin):
        da = diff(e.lhs, wrt)
        db = diff(e.rhs, wrt)
        if e.op == "+":
            return Bin("+", da, db)
        if e.op == "-":
            return Bin("-", da, db)
        if e.op == "*":
            return Bin("+", Bin("*", da, e.rhs), Bin("*", e.lhs, db))
        # (a/b)' = (a'b - a b') / b^2
        num = Bin("-", Bin("*", da, e.rhs), Bin("*", e.lhs, db))
        return Bin("/", num, Pow(e.rhs, 2.0))
    if isinstance(e, Pow):
        c = e.exponent
        if c == 0.0:
            return Const(0.0)
        inner = diff(e.base, wrt)
        scaled = Bin("*", Const(c), Pow(e.base, c - 1.0))
        return Bin("*", scaled, inner)
    raise TypeError(f"not an Expr: {e!r}")
