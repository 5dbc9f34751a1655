"""Recursive-descent parser and evaluator for the N-function expression DSL.

Grammar (whitespace insignificant):

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := base ("^" unary)?            # "^" is right-associative
    base   := NUMBER | "x" | IDENT | FUNC "(" expr ["," expr] ")" | "(" expr ")"

NUMBER is a decimal literal, IDENT names a parameter supplied at parse time,
and FUNC is one of abs, log, exp, sqrt, cosh, sinh, tanh (one argument) or
min2, max2 (two comma-separated arguments). log is the natural logarithm.

Expressions compile to plain float -> float closures with parameter values
bound at compile time.
"""

import math
import re
from collections.abc import Mapping
from typing import Callable

from .errors import ExpressionError

_FUNCS1 = {
    "abs": math.fabs,
    "log": math.log,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "cosh": math.cosh,
    "sinh": math.sinh,
    "tanh": math.tanh,
}
_FUNCS2 = {"min2": min, "max2": max}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            rest = src[pos:].lstrip()
            if not rest:
                break
            raise ExpressionError(f"unexpected character {rest[0]!r}", pos)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, params: Mapping[str, float]):
        self.src = src
        self.params = dict(params)
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            raise ExpressionError(f"expected {op!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Callable[[float], float]:
        fn = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"trailing input {text!r}", pos)
        return fn

    def expr(self):
        fn = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                if text == "+":
                    fn = (lambda a, b: lambda x: a(x) + b(x))(fn, rhs)
                else:
                    fn = (lambda a, b: lambda x: a(x) - b(x))(fn, rhs)
            else:
                return fn

    def term(self):
        fn = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                rhs = self.unary()
                if text == "*":
                    fn = (lambda a, b: lambda x: a(x) * b(x))(fn, rhs)
                else:
                    fn = (lambda a, b: lambda x: a(x) / b(x))(fn, rhs)
            else:
                return fn

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            inner = self.unary()
            return lambda x: -inner(x)
        return self.factor()

    def factor(self):
        fn = self.base()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            exponent = self.unary()
            return (lambda a, b: lambda x: math.pow(a(x), b(x)))(fn, exponent)
        return fn

    def base(self):
        kind, text, pos = self.take()
        if kind == "num":
            value = float(text)
            return lambda x: value
        if kind == "op" and text == "(":
            fn = self.expr()
            self.expect_op(")")
            return fn
        if kind == "name":
            if text == "x":
                return lambda x: x
            if text in _FUNCS1:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                f = _FUNCS1[text]
                return (lambda f, a: lambda x: f(a(x)))(f, arg)
            if text in _FUNCS2:
                self.expect_op("(")
                a = self.expr()
                self.expect_op(",")
                b = self.expr()
                self.expect_op(")")
                f = _FUNCS2[text]
                return (lambda f, a, b: lambda x: f(a(x), b(x)))(f, a, b)
            if text in self.params:
                value = float(self.params[text])
                return lambda x: value
            raise ExpressionError(f"unknown identifier {text!r}", pos)
        raise ExpressionError(f"expected a value, found {text or 'end of input'!r}", pos)


def compile_expression(src: str, params: Mapping[str, float] | None = None
                       ) -> Callable[[float], float]:
    """Compile a DSL expression into a float -> float closure.

    Parameter values are baked in; evaluation errors (log of a negative
    number, division by zero, overflow) propagate as the usual math errors.
    """
    return _Parser(src, params or {}).parse()
