"""A small arithmetic language for ``f(t)``, ``k(t, s)``, ``omega(t)`` and ``psi(t)``.

Grammar (lowest to highest precedence)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := NUMBER | 't' | 's' | FUNC '(' args ')' | '(' sum ')'

Evaluation works on floats or on numpy arrays (broadcast elementwise).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, NumericOverflow, ParseError, UnboundVariable, UnknownIdentifier

VARIABLES = ("t", "s")
FUNCTIONS = {
    "exp": 1,
    "log": 1,
    "sin": 1,
    "cos": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Neg, BinOp, Call]


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _byte_offset(src: str, char_pos: int) -> int:
    return len(src[:char_pos].encode("utf-8"))


def _tokenize(src: str):
    pos = 0
    tokens = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", _byte_offset(src, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _byte_offset(src, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(src, len(src))))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.advance()
        if tok[1] != text:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok[2])
        return tok

    def parse(self):
        node = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def sum(self):
        node = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, offset = self.advance()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {text!r} overflows", offset)
            return Num(value)
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.sum()]
                while self.peek()[1] == ",":
                    self.advance()
                    args.append(self.sum())
                close = self.expect(")")
                if len(args) != FUNCTIONS[text]:
                    raise ParseError(
                        f"{text} takes {FUNCTIONS[text]} argument(s), got {len(args)}", close[2]
                    )
                return Call(text, tuple(args))
            raise UnknownIdentifier(text, offset)
        if text == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", offset)


def parse(src: str) -> Expr:
    if not isinstance(src, str):
        raise ParseError(f"expression must be a string, got {type(src).__name__}", 0)
    return _Parser(src).parse()


def to_string(e: Expr) -> str:
    """Fully parenthesized source text; parsing it gives back the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    return f"{e.func}({', '.join(to_string(a) for a in e.args)})"


def variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    out = set()
    for a in e.args:
        out |= variables(a)
    return out


def _check_domain(x, name, strict):
    bad = x <= 0 if strict else x < 0
    if np.any(bad):
        raise DomainError(f"{name} of a {'non-positive' if strict else 'negative'} number")


def _eval(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        val = env.get(e.name)
        if val is None:
            raise UnboundVariable(e.name)
        return val
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, BinOp):
        x, y = _eval(e.left, env), _eval(e.right, env)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return x * y
        if e.op == "/":
            return np.divide(x, y)
        return _power(x, y)
    args = [_eval(a, env) for a in e.args]
    if e.func == "exp":
        return np.exp(args[0])
    if e.func == "log":
        _check_domain(args[0], "log", strict=True)
        return np.log(args[0])
    if e.func == "sqrt":
        _check_domain(args[0], "sqrt", strict=False)
        return np.sqrt(args[0])
    if e.func == "sin":
        return np.sin(args[0])
    if e.func == "cos":
        return np.cos(args[0])
    if e.func == "abs":
        return np.abs(args[0])
    return _power(*args)


def _power(x, y):
    x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any((x_arr < 0) & (y_arr != np.round(y_arr))):
        raise DomainError("negative base raised to a non-integer power")
    return np.power(x_arr, y_arr)


def evaluate(e: Expr, t, s=None):
    """Evaluate ``e`` at ``t`` (and ``s``); scalars in give a float out, arrays broadcast."""
    env = {"t": t}
    if s is not None:
        env["s"] = s
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    arr = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericOverflow(f"non-finite value while evaluating {to_string(e)}")
    shape = np.broadcast_shapes(np.shape(t), np.shape(s) if s is not None else ())
    if shape == ():
        return float(arr)
    return np.broadcast_to(arr, shape).astype(float)


# ``eval`` would shadow the builtin
eval_expr = evaluate


def as_expr(e) -> Expr:
    """Accept either parsed trees or source strings."""
    if isinstance(e, (Num, Var, Neg, BinOp, Call)):
        return e
    if isinstance(e, (int, float)) and not isinstance(e, bool):
        return Num(float(e))
    return parse(e)


__all__ = [
    "Num", "Var", "Neg", "BinOp", "Call", "Expr",
    "parse", "evaluate", "eval_expr", "to_string", "variables", "as_expr",
]
