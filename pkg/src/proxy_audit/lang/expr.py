"""AST for the audit expression language.

Arithmetic terms are built from real constants, variables, n-ary
associative operators (+, *), binary - and /, and ite(guard, a, b).
Boolean terms (guards) are built from true/false, !, n-ary && and ||,
and relational comparisons of arithmetic terms.

Expressions are immutable; n-ary operator chains are flattened at
construction so `a + b + c` is a single three-operand node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..errors import ProgramTypeError

ASSOC_OPS = ("add", "mul", "and", "or")
BIN_OPS = ("sub", "div")
REL_OPS = ("le", "lt", "eq", "ge", "gt")

REAL = "real"
BOOL = "bool"

_NARY_SYMBOL = {"add": "+", "mul": "*", "and": "&&", "or": "||"}
_BIN_SYMBOL = {"sub": "-", "div": "/"}
_REL_SYMBOL = {"le": "<=", "lt": "<", "eq": "==", "ge": ">=", "gt": ">"}


class Expr:
    """Base node. Subclasses are frozen dataclasses."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    @property
    def is_constant(self) -> bool:
        return isinstance(self, (Real, Bool))

    def node_count(self) -> int:
        return 1 + sum(c.node_count() for c in self.children())

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        _collect_vars(self, out)
        return out

    def walk(self) -> Iterator["Expr"]:
        yield self
        for c in self.children():
            yield from c.walk()

    def __str__(self) -> str:
        return print_expr(self)


def _collect_vars(e: Expr, out: set[str]) -> None:
    if isinstance(e, Var):
        out.add(e.name)
    for c in e.children():
        _collect_vars(c, out)


@dataclass(frozen=True, slots=True)
class Real(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, slots=True)
class Bool(Expr):
    value: bool


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class NAry(Expr):
    op: str
    args: tuple[Expr, ...]

    def __post_init__(self):
        if self.op not in ASSOC_OPS:
            raise ValueError(f"not an associative operator: {self.op}")
        flat: list[Expr] = []
        for a in self.args:
            if isinstance(a, NAry) and a.op == self.op:
                flat.extend(a.args)
            else:
                flat.append(a)
        if len(flat) < 2:
            raise ValueError(f"{self.op} needs at least two operands")
        object.__setattr__(self, "args", tuple(flat))

    def children(self):
        return self.args


@dataclass(frozen=True, slots=True)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BIN_OPS:
            raise ValueError(f"not a binary operator: {self.op}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Not(Expr):
    inner: Expr

    def children(self):
        return (self.inner,)


@dataclass(frozen=True, slots=True)
class Rel(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in REL_OPS:
            raise ValueError(f"not a relational operator: {self.op}")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Ite(Expr):
    cond: Expr
    then: Expr
    els: Expr

    def children(self):
        return (self.cond, self.then, self.els)


def nary(op: str, *args: Expr) -> NAry:
    return NAry(op, tuple(args))


# ---------------------------------------------------------------------------
# Typing

def infer_types(e: Expr, env: Optional[dict[str, str]] = None,
                expected: Optional[str] = None) -> tuple[str, dict[str, str]]:
    """Infer the type of `e` and of every variable occurring in it.

    `env` may pre-bind variable types; newly seen variables get the type
    forced by their syntactic context (boolean only for substitution
    variables sitting in guard position). Conflicts raise ProgramTypeError.
    """
    env = dict(env) if env else {}
    t = _check(e, env, expected)
    return t, env


def _check(e: Expr, env: dict[str, str], expected: Optional[str]) -> str:
    if isinstance(e, Real):
        t = REAL
    elif isinstance(e, Bool):
        t = BOOL
    elif isinstance(e, Var):
        if e.name in env:
            t = env[e.name]
            if expected is not None and t != expected:
                raise ProgramTypeError(
                    f"variable {e.name!r} is {t} but used as {expected}")
        else:
            t = expected if expected is not None else REAL
            env[e.name] = t
        return t
    elif isinstance(e, NAry):
        t = REAL if e.op in ("add", "mul") else BOOL
        for a in e.args:
            _check(a, env, t)
    elif isinstance(e, Bin):
        t = REAL
        _check(e.left, env, REAL)
        _check(e.right, env, REAL)
    elif isinstance(e, Not):
        t = BOOL
        _check(e.inner, env, BOOL)
    elif isinstance(e, Rel):
        t = BOOL
        _check(e.left, env, REAL)
        _check(e.right, env, REAL)
    elif isinstance(e, Ite):
        t = REAL
        _check(e.cond, env, BOOL)
        _check(e.then, env, REAL)
        _check(e.els, env, REAL)
    else:  # pragma: no cover
        raise TypeError(f"unknown node {e!r}")
    if expected is not None and t != expected:
        raise ProgramTypeError(f"expected {expected}, got {t}: {e}")
    return t


# ---------------------------------------------------------------------------
# Printing

# precedence: or < and < not < rel < add/sub < mul/div < atom
_PREC = {"or": 1, "and": 2, "not": 3, "rel": 4, "add": 5, "sub": 5,
         "mul": 6, "div": 6, "atom": 9}


def print_expr(e: Expr) -> str:
    return _pp(e)[0]


def _pp(e: Expr) -> tuple[str, int]:
    if isinstance(e, Real):
        return repr(e.value), _PREC["atom"]
    if isinstance(e, Bool):
        return ("true" if e.value else "false"), _PREC["atom"]
    if isinstance(e, Var):
        return e.name, _PREC["atom"]
    if isinstance(e, Ite):
        c, _ = _pp(e.cond)
        t, _ = _pp(e.then)
        f, _ = _pp(e.els)
        return f"ite({c}, {t}, {f})", _PREC["atom"]
    if isinstance(e, Not):
        s, p = _pp(e.inner)
        if p < _PREC["not"]:
            s = f"({s})"
        return f"!{s}", _PREC["not"]
    if isinstance(e, NAry):
        my = _PREC[e.op]
        parts = []
        for i, a in enumerate(e.args):
            s, p = _pp(a)
            # same-op children are impossible (flattened); equal precedence
            # means sub under add or div under mul, which reassociates when
            # reparsed anywhere but the leftmost slot.
            if p < my or (p == my and i > 0):
                s = f"({s})"
            parts.append(s)
        sym = f" {_NARY_SYMBOL[e.op]} "
        return sym.join(parts), my
    if isinstance(e, Bin):
        my = _PREC[e.op]
        ls, lp = _pp(e.left)
        rs, rp = _pp(e.right)
        if lp < my:
            ls = f"({ls})"
        # right operand of - and / needs parens at equal precedence
        if rp <= my:
            rs = f"({rs})"
        return f"{ls} {_BIN_SYMBOL[e.op]} {rs}", my
    if isinstance(e, Rel):
        ls, lp = _pp(e.left)
        rs, rp = _pp(e.right)
        if lp <= _PREC["rel"]:
            ls = f"({ls})"
        if rp <= _PREC["rel"]:
            rs = f"({rs})"
        return f"{ls} {_REL_SYMBOL[e.op]} {rs}", _PREC["rel"]
    raise TypeError(f"unknown node {e!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Canonical form (identity used for fingerprints and witness matching)

def canonical(e: Expr) -> Expr:
    """Flatten associative operators and sort their operands structurally."""
    if isinstance(e, NAry):
        args = [canonical(a) for a in e.args]
        args.sort(key=print_expr)
        return NAry(e.op, tuple(args))
    if isinstance(e, Bin):
        return Bin(e.op, canonical(e.left), canonical(e.right))
    if isinstance(e, Not):
        return Not(canonical(e.inner))
    if isinstance(e, Rel):
        return Rel(e.op, canonical(e.left), canonical(e.right))
    if isinstance(e, Ite):
        return Ite(canonical(e.cond), canonical(e.then), canonical(e.els))
    return e


def rename_vars(e: Expr, mapping: dict[str, str]) -> Expr:
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name))
    if isinstance(e, NAry):
        return NAry(e.op, tuple(rename_vars(a, mapping) for a in e.args))
    if isinstance(e, Bin):
        return Bin(e.op, rename_vars(e.left, mapping), rename_vars(e.right, mapping))
    if isinstance(e, Not):
        return Not(rename_vars(e.inner, mapping))
    if isinstance(e, Rel):
        return Rel(e.op, rename_vars(e.left, mapping), rename_vars(e.right, mapping))
    if isinstance(e, Ite):
        return Ite(rename_vars(e.cond, mapping),
                   rename_vars(e.then, mapping),
                   rename_vars(e.els, mapping))
    return e
