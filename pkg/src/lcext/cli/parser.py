"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := "-" factor | atom ("^" uint)?
    atom   := rational | var | "(" expr ")" | "sqrt" "(" uint ")"

``rational`` is ``uint`` or ``uint/uint``.  ``sqrt(n)`` is only accepted when
``allow_sqrt`` is set (result files); inputs are rational.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..field import sqrt_rational
from ..poly import CORE_VARS, MultiPoly


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, text: str):
        super().__init__(f"{message} at offset {offset} in {text!r}")
        self.offset = offset
        self.text = text


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sqrt:
    radicand: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = mt.lastgroup
        start = mt.start(kind)
        tokens.append((kind, mt.group(kind), start))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_sqrt: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_sqrt = allow_sqrt

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", off, self.text)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self):
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.factor())
        node = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, off = self.take()
            if kind == "op" and val == "-":
                raise ParseError("negative exponent", off, self.text)
            if kind != "num" or "/" in val:
                raise ParseError("exponent must be a nonnegative integer", off, self.text)
            node = Pow(node, int(val))
        return node

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            if re.search(r"/0+$", val):
                raise ParseError("zero denominator", off, self.text)
            return Num(Fraction(val))
        if kind == "name":
            if val == "sqrt":
                if not self.allow_sqrt:
                    raise ParseError("sqrt(...) is only accepted in result files", off, self.text)
                self.expect("(")
                k2, v2, o2 = self.take()
                if k2 != "num" or "/" in v2:
                    raise ParseError("sqrt expects a positive integer", o2, self.text)
                self.expect(")")
                return Sqrt(int(v2))
            return Var(val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {val or 'end of input'!r}", off, self.text)


def parse_ast(text: str, allow_sqrt: bool = False):
    if not text or not text.strip():
        raise ParseError("empty expression", 0, text)
    return _Parser(text, allow_sqrt).parse()


def evaluate_ast(node, variables: tuple[str, ...], text: str = "") -> MultiPoly:
    if isinstance(node, Num):
        return MultiPoly.const(node.value, variables)
    if isinstance(node, Sqrt):
        return MultiPoly.const(sqrt_rational(node.radicand), variables)
    if isinstance(node, Var):
        if node.name not in variables:
            raise ParseError(f"unknown variable {node.name!r}", text.find(node.name), text)
        return MultiPoly.var(node.name, variables)
    if isinstance(node, Neg):
        return -evaluate_ast(node.operand, variables, text)
    if isinstance(node, Pow):
        return evaluate_ast(node.base, variables, text) ** node.exponent
    if isinstance(node, BinOp):
        a = evaluate_ast(node.left, variables, text)
        b = evaluate_ast(node.right, variables, text)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    raise TypeError(f"bad node {node!r}")


def parse_poly_expr(
    text: str,
    params: tuple[str, ...] | list[str] = (),
    allow_sqrt: bool = False,
    variables: tuple[str, ...] | None = None,
) -> MultiPoly:
    """Parse ``text`` into a canonical :class:`MultiPoly`.

    Allowed names are the core variables ``d``, ``l``, ``m`` plus ``params``
    (or exactly ``variables`` when given).  The result is expressed over that
    full variable list.
    """
    if variables is None:
        variables = CORE_VARS + tuple(p for p in params if p not in CORE_VARS)
    return evaluate_ast(parse_ast(text, allow_sqrt), tuple(variables), text)


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, ``-p/q`` or an integer."""
    s = str(text).strip()
    if not re.fullmatch(r"[-+]?\d+(/0*[1-9]\d*)?", s):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(s)
