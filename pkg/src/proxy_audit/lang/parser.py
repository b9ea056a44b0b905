"""Recursive-descent parser for the textual program format.

    lambda x, y. ite(x + y <= 0.0, 1.0, 0.0)

Operators by loosening precedence: * / then + - then relational then !
then && then ||. Chains of +, *, && and || collapse into flat n-ary
nodes; - and / stay binary and left-associative.
"""

from __future__ import annotations

import re

from ..errors import ProgramSyntaxError
from . import expr as E
from .expr import Bin, Bool, Expr, Ite, NAry, Not, Real, Rel, Var
from .program import Program

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|==|&&|\|\||[-+*/<>!(),.])
""", re.VERBOSE)

_KEYWORDS = {"lambda", "ite", "true", "false"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        tokens.append((m.lastgroup, m.group(), m.start()))
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value:
            raise ProgramSyntaxError(f"expected {value!r}, found {text!r}", pos)

    def at(self, value: str) -> bool:
        return self.peek()[1] == value

    def program(self) -> Program:
        kind, text, pos = self.next()
        if text != "lambda":
            raise ProgramSyntaxError("program must start with 'lambda'", pos)
        params = [self.ident()]
        while self.at(","):
            self.next()
            params.append(self.ident())
        self.expect(".")
        body = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ProgramSyntaxError(f"trailing input {text!r}", pos)
        _, env = E.infer_types(body)
        return Program(tuple(params), body,
                       {v: t for v, t in env.items() if t == E.BOOL})

    def ident(self) -> str:
        kind, text, pos = self.next()
        if kind != "name" or text in _KEYWORDS:
            raise ProgramSyntaxError(f"expected identifier, found {text!r}", pos)
        return text

    def expr(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        args = [self.and_expr()]
        while self.at("||"):
            self.next()
            args.append(self.and_expr())
        return args[0] if len(args) == 1 else NAry("or", tuple(args))

    def and_expr(self) -> Expr:
        args = [self.not_expr()]
        while self.at("&&"):
            self.next()
            args.append(self.not_expr())
        return args[0] if len(args) == 1 else NAry("and", tuple(args))

    def not_expr(self) -> Expr:
        if self.at("!"):
            self.next()
            return Not(self.not_expr())
        return self.rel_expr()

    _REL = {"<=": "le", "<": "lt", "==": "eq", ">=": "ge", ">": "gt"}

    def rel_expr(self) -> Expr:
        left = self.add_expr()
        tok = self.peek()[1]
        if tok in self._REL:
            self.next()
            right = self.add_expr()
            return Rel(self._REL[tok], left, right)
        return left

    def add_expr(self) -> Expr:
        acc = self.mul_expr()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.mul_expr()
            if op == "+":
                acc = NAry("add", (acc, rhs))
            else:
                acc = Bin("sub", acc, rhs)
        return acc

    def mul_expr(self) -> Expr:
        acc = self.unary_expr()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            rhs = self.unary_expr()
            if op == "*":
                acc = NAry("mul", (acc, rhs))
            else:
                acc = Bin("div", acc, rhs)
        return acc

    def unary_expr(self) -> Expr:
        # negative literals only; the grammar has no general unary minus
        if self.at("-"):
            kind, text, pos = self.tokens[self.i + 1]
            if kind == "num":
                self.next()
                self.next()
                return Real(-float(text))
            raise ProgramSyntaxError("'-' is binary; negate literals only", pos)
        return self.atom()

    def atom(self) -> Expr:
        kind, text, pos = self.next()
        if kind == "num":
            return Real(float(text))
        if text == "true":
            return Bool(True)
        if text == "false":
            return Bool(False)
        if text == "ite":
            self.expect("(")
            cond = self.expr()
            self.expect(",")
            then = self.expr()
            self.expect(",")
            els = self.expr()
            self.expect(")")
            return Ite(cond, then, els)
        if kind == "name":
            if text in _KEYWORDS:
                raise ProgramSyntaxError(f"misplaced keyword {text!r}", pos)
            return Var(text)
        if text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ProgramSyntaxError(f"unexpected token {text!r}", pos)


def parse_program(text: str) -> Program:
    """Parse program text; raises ProgramSyntaxError / ProgramTypeError."""
    return _Parser(text).program()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise ProgramSyntaxError(f"trailing input {tok!r}", pos)
    return e
