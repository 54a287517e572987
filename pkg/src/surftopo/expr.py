"""Arithmetic expressions in ``u`` and ``v`` compiled to vectorized numpy callables.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?          # right associative, binds tighter than unary minus
    atom   := NUMBER | 'u' | 'v' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := sin | cos | tan | exp | sqrt | log
"""
from __future__ import annotations

import math
import re

import numpy as np

from .errors import ExpressionSyntaxError

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "sqrt": np.sqrt, "log": np.log,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("u", "v")

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ExpressionSyntaxError(f"expected {value!r}, got {val or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            operand = self.unary()
            return ("neg", operand) if op == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return ("num", float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            if val in VARIABLES:
                return ("var", val)
            if val in CONSTANTS:
                return ("num", CONSTANTS[val])
            raise ExpressionSyntaxError(f"unknown name {val!r}", pos)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


_BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}


def _compile(node):
    tag = node[0]
    if tag == "num":
        value = node[1]
        return lambda u, v: value
    if tag == "var":
        return (lambda u, v: u) if node[1] == "u" else (lambda u, v: v)
    if tag == "neg":
        inner = _compile(node[1])
        return lambda u, v: np.negative(inner(u, v))
    if tag == "call":
        fn, inner = FUNCTIONS[node[1]], _compile(node[2])
        return lambda u, v: fn(inner(u, v))
    op = _BINARY[tag]
    left, right = _compile(node[1]), _compile(node[2])
    return lambda u, v: op(left(u, v), right(u, v))


class Expression:
    """A parsed expression; calling it evaluates elementwise on arrays."""

    def __init__(self, source: str):
        self.source = source
        self.tree = _Parser(source).parse()
        self._fn = _compile(self.tree)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        with np.errstate(all="ignore"):
            out = self._fn(u, v)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(u, v).shape).copy()

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse_expression(text: str) -> Expression:
    return Expression(text)


def evaluate_constant(text: str) -> float:
    """Evaluate a variable-free expression such as ``2*pi``."""
    e = Expression(text)
    if "'var'" in repr(e.tree):
        raise ExpressionSyntaxError(f"{text!r} must not contain variables")
    return float(e(0.0, 0.0))
