"""Programs: a parameter list over an expression body, plus evaluation.

`evaluate` is the reference tree-walking interpreter; the kernel package
holds the bytecode fast path. Both agree on semantics: ite evaluates
exactly one branch, && and || evaluate all operands, division by zero is
a hard error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..errors import DivisionByZero, ProgramTypeError, UnboundVariable
from . import expr as E
from .expr import Expr, infer_types, print_expr


@dataclass(frozen=True)
class Program:
    params: tuple[str, ...]
    body: Expr
    # variable types; params missing from the map are real-valued
    var_types: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise ProgramTypeError("duplicate parameter names")
        free = self.body.free_vars()
        extra = free - set(self.params)
        if extra:
            raise ProgramTypeError(f"unbound variables: {sorted(extra)}")
        env = {p: self.var_types.get(p, E.REAL) for p in self.params}
        infer_types(self.body, env=env)

    def type_of(self, name: str) -> str:
        return self.var_types.get(name, E.REAL)

    @property
    def body_type(self) -> str:
        t, _ = infer_types(
            self.body, env={p: self.type_of(p) for p in self.params})
        return t

    def node_count(self) -> int:
        return self.body.node_count()

    def __str__(self) -> str:
        return print_program(self)


def print_program(p: Program) -> str:
    return f"lambda {', '.join(p.params)}. {print_expr(p.body)}"


def canonical_text(p: Program) -> str:
    """Canonical printed form: associative operands flattened and sorted,
    parameters renamed positionally. Stable identity for fingerprints."""
    mapping = {name: f"v{i + 1}" for i, name in enumerate(p.params)}
    body = E.canonical(E.rename_vars(p.body, mapping))
    params = [mapping[name] for name in p.params]
    return f"lambda {', '.join(params)}. {print_expr(body)}"


def fingerprint_text(p: Program) -> str:
    """Like canonical_text but with unused parameters dropped first, so
    adding a dummy input to the parent never changes a proxy's identity."""
    free = p.body.free_vars()
    used = tuple(name for name in p.params if name in free)
    mapping = {name: f"v{i + 1}" for i, name in enumerate(used)}
    body = E.canonical(E.rename_vars(p.body, mapping))
    return f"lambda {', '.join(mapping[n] for n in used)}. {print_expr(body)}"


def canonical_eq(a: Program, b: Program) -> bool:
    return canonical_text(a) == canonical_text(b)


def evaluate(p: Program, row: Mapping[str, float]):
    """Big-step evaluation of `p` on a single value assignment."""
    for name in p.params:
        if name not in row:
            raise UnboundVariable(f"no value for parameter {name!r}")
    return eval_expr(p.body, row)


def eval_expr(e: Expr, row: Mapping[str, float]):
    if isinstance(e, E.Real):
        return e.value
    if isinstance(e, E.Bool):
        return e.value
    if isinstance(e, E.Var):
        try:
            return row[e.name]
        except KeyError:
            raise UnboundVariable(f"no value for variable {e.name!r}") from None
    if isinstance(e, E.NAry):
        if e.op == "add":
            return sum(eval_expr(a, row) for a in e.args)
        if e.op == "mul":
            out = 1.0
            for a in e.args:
                out *= eval_expr(a, row)
            return out
        if e.op == "and":
            vals = [bool(eval_expr(a, row)) for a in e.args]
            return all(vals)
        vals = [bool(eval_expr(a, row)) for a in e.args]
        return any(vals)
    if isinstance(e, E.Bin):
        a = eval_expr(e.left, row)
        b = eval_expr(e.right, row)
        if e.op == "sub":
            return a - b
        if b == 0:
            raise DivisionByZero()
        return a / b
    if isinstance(e, E.Not):
        return not bool(eval_expr(e.inner, row))
    if isinstance(e, E.Rel):
        a = eval_expr(e.left, row)
        b = eval_expr(e.right, row)
        if e.op == "le":
            return a <= b
        if e.op == "lt":
            return a < b
        if e.op == "eq":
            return a == b
        if e.op == "ge":
            return a >= b
        return a > b
    if isinstance(e, E.Ite):
        if bool(eval_expr(e.cond, row)):
            return eval_expr(e.then, row)
        return eval_expr(e.els, row)
    raise TypeError(f"unknown node {e!r}")  # pragma: no cover
