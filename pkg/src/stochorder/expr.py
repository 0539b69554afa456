"""Recursive-descent parser for piecewise density expressions.

Grammar (whitespace is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" integer)?
    atom   := number | name | "exp" "(" expr ")" | "(" expr ")"
    integer:= ["-"] digits

``x`` is the free variable; any other name must be bound by the caller's
parameter table when the expression is evaluated.  Exponents are integer
literals, so every expression is a polynomial in x composed with exp.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import SpecError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    column: int  # 1-based


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise SpecError(f"unexpected character {source[col - 1]!r}", column=col)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    tokens.append(Token("end", "", len(source) + 1))
    return tokens


class Node:
    def evaluate(self, x, env):
        raise NotImplementedError

    def names(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, x, env):
        return np.full(np.shape(x), self.value)


@dataclass(frozen=True)
class Name(Node):
    ident: str
    column: int

    def evaluate(self, x, env):
        if self.ident == "x":
            return np.asarray(x, dtype=float)
        try:
            return np.full(np.shape(x), float(env[self.ident]))
        except KeyError:
            raise SpecError(f"unbound name {self.ident!r}", column=self.column) from None

    def names(self):
        return {self.ident}


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def evaluate(self, x, env):
        return -self.operand.evaluate(x, env)

    def names(self):
        return self.operand.names()


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, x, env):
        a = self.left.evaluate(x, env)
        b = self.right.evaluate(x, env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b

    def names(self):
        return self.left.names() | self.right.names()


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int

    def evaluate(self, x, env):
        b = self.base.evaluate(x, env)
        with np.errstate(divide="ignore", invalid="ignore"):
            return b**self.exponent if self.exponent >= 0 else 1.0 / b ** (-self.exponent)

    def names(self):
        return self.base.names()


@dataclass(frozen=True)
class Exp(Node):
    arg: Node

    def evaluate(self, x, env):
        with np.errstate(over="ignore"):
            return np.exp(self.arg.evaluate(x, env))

    def names(self):
        return self.arg.names()


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise SpecError(f"expected {text!r}, found {found!r}", column=self.tok.column)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise SpecError(f"unexpected {self.tok.text!r}", column=self.tok.column)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.text != "^":
            return base
        self.advance()
        sign = 1
        if self.tok.text == "-":
            self.advance()
            sign = -1
        t = self.tok
        if t.kind != "num" or not re.fullmatch(r"\d+", t.text):
            raise SpecError("exponent must be an integer literal", column=t.column)
        self.advance()
        return Pow(base, sign * int(t.text))

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Exp(arg)
            return Name(t.text, t.column)
        if t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise SpecError(f"unexpected {found!r}", column=t.column)


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with its source text."""

    source: str
    tree: Node

    def __call__(self, x, env=None):
        return self.tree.evaluate(x, env or {})

    @property
    def parameters(self) -> set[str]:
        return self.tree.names() - {"x"}


def parse(source: str) -> Expression:
    """Parse ``source``; raises :class:`SpecError` with a column on failure."""
    if not isinstance(source, str):
        raise SpecError("expression must be a string")
    return Expression(source, _Parser(source).parse())
