"""Parser for custom degree-pair functions written in ``x`` and ``y``.

Grammar (whitespace is ignored)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := unary ('^' factor)?
    unary   := '-' unary | primary
    primary := number | 'x' | 'y' | func '(' expr (',' expr)? ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
means ``-(x^2)`` and ``2^3^2`` is ``2^9``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .indices import IndexFunction

FUNCTIONS = {
    "sqrt": (1, math.sqrt),
    "abs": (1, abs),
    "exp": (1, math.exp),
    "log": (1, math.log),
    "min": (2, min),
    "max": (2, max),
}

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class ExprSyntaxError(ValueError):
    """Malformed expression; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# AST nodes -----------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, x, y):
        return self.value

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def eval(self, x, y):
        return x if self.name == "x" else y

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: object

    def eval(self, x, y):
        return -self.operand.eval(x, y)

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def eval(self, x, y):
        a = self.left.eval(x, y)
        b = self.right.eval(x, y)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        # math.pow raises instead of returning a complex number
        return math.pow(a, b)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple

    def eval(self, x, y):
        return FUNCTIONS[self.name][1](*(a.eval(x, y) for a in self.args))

    def __str__(self):
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class HExpression:
    source: str
    ast: object

    def __call__(self, x, y):
        """Evaluate at ``(x, y)``; domain errors give NaN, overflow gives inf."""
        try:
            return float(self.ast.eval(float(x), float(y)))
        except OverflowError:
            return math.inf
        except (ValueError, ZeroDivisionError):
            return math.nan

    def pretty(self) -> str:
        return str(self.ast)


# Tokenizer and parser ------------------------------------------------------


def _tokenize(src):
    tokens = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
            continue
        m = _NUMBER.match(src, i)
        if m:
            tokens.append(("num", m.group(), i))
            i = m.end()
            continue
        m = _NAME.match(src, i)
        if m:
            tokens.append(("name", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^(),":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind, what):
        if self.tok[0] != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message):
        kind, text, pos = self.tok
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"{message}, found {found}", pos)

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.fail("expected operator")
        return node

    def expr(self):
        node = self.term()
        while self.tok[0] in "+-":
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[0] in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        base = self.unary()
        if self.tok[0] == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def unary(self):
        if self.tok[0] == "-":
            self.advance()
            # -a^b is -(a^b): the operand of unary minus is a full factor
            return Neg(self.factor())
        return self.primary()

    def primary(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if text in ("x", "y"):
                return Var(text)
            if text not in FUNCTIONS:
                raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
            arity = FUNCTIONS[text][0]
            self.expect("(", f"'(' after {text}")
            args = [self.expr()]
            while self.tok[0] == ",":
                self.advance()
                args.append(self.expr())
            if len(args) != arity:
                raise ExprSyntaxError(
                    f"{text} takes {arity} argument{'s' if arity > 1 else ''}, got {len(args)}",
                    pos,
                )
            self.expect(")", "')'")
            return Call(text, tuple(args))
        if kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        self.fail("expected a number, x, y, function or '('")


def parse(source: str) -> HExpression:
    return HExpression(source, _Parser(source).parse())


def to_index_function(e: HExpression, name: str = "custom") -> IndexFunction:
    """Register ``e`` as an index; raises SymmetryError or NonFiniteError."""
    return IndexFunction(name, e, e.source)
