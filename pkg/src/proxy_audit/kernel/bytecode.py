"""Compile programs to a small stack bytecode.

The hot loops of this toolkit evaluate one program over every row of a
dataset, many times. Compiling once to flat instruction arrays lets the
row loop run without touching the AST; the interpreter lives in the
compiled extension (kernel._core) with a pure-Python twin (pyeval).

Stack values are float64; booleans are 1.0 / 0.0. ite compiles to a
conditional jump so exactly one branch executes, which both preserves
division-by-zero semantics and lets MARK record branch reachability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..lang import expr as E
from ..lang.program import Program

CONST = 0
LOAD = 1
ADD = 2
MUL = 3
SUB = 4
DIV = 5
AND = 6
OR = 7
NOT = 8
LE = 9
LT = 10
EQ = 11
GE = 12
GT = 13
JZ = 14
JMP = 15
MARK = 16

_REL_OPCODE = {"le": LE, "lt": LT, "eq": EQ, "ge": GE, "gt": GT}
_NARY_OPCODE = {"add": ADD, "mul": MUL, "and": AND, "or": OR}


@dataclass(frozen=True)
class Code:
    ops: np.ndarray     # int32, opcode per instruction
    iarg: np.ndarray    # int32, column / operand count / jump target
    farg: np.ndarray    # float64, constant for CONST
    stack_depth: int
    n_columns: int


class _Emitter:
    def __init__(self, columns: Mapping[str, int], mark_var: Optional[str]):
        self.columns = columns
        self.mark_var = mark_var
        self.ops: list[int] = []
        self.iarg: list[int] = []
        self.farg: list[float] = []

    def emit(self, op: int, i: int = 0, f: float = 0.0) -> int:
        self.ops.append(op)
        self.iarg.append(i)
        self.farg.append(f)
        return len(self.ops) - 1

    def patch(self, at: int, target: int) -> None:
        self.iarg[at] = target

    def expr(self, e: E.Expr) -> None:
        if isinstance(e, E.Real):
            self.emit(CONST, 0, e.value)
        elif isinstance(e, E.Bool):
            self.emit(CONST, 0, 1.0 if e.value else 0.0)
        elif isinstance(e, E.Var):
            if e.name == self.mark_var:
                self.emit(MARK)
            self.emit(LOAD, self.columns[e.name])
        elif isinstance(e, E.NAry):
            for a in e.args:
                self.expr(a)
            self.emit(_NARY_OPCODE[e.op], len(e.args))
        elif isinstance(e, E.Bin):
            self.expr(e.left)
            self.expr(e.right)
            self.emit(SUB if e.op == "sub" else DIV)
        elif isinstance(e, E.Not):
            self.expr(e.inner)
            self.emit(NOT)
        elif isinstance(e, E.Rel):
            self.expr(e.left)
            self.expr(e.right)
            self.emit(_REL_OPCODE[e.op])
        elif isinstance(e, E.Ite):
            self.expr(e.cond)
            jz = self.emit(JZ)
            self.expr(e.then)
            jmp = self.emit(JMP)
            self.patch(jz, len(self.ops))
            self.expr(e.els)
            self.patch(jmp, len(self.ops))
        else:  # pragma: no cover
            raise TypeError(f"unknown node {e!r}")


def _max_stack(e: E.Expr) -> int:
    if isinstance(e, (E.Real, E.Bool, E.Var)):
        return 1
    if isinstance(e, E.NAry):
        return max(i + _max_stack(a) for i, a in enumerate(e.args))
    if isinstance(e, (E.Bin, E.Rel)):
        return max(_max_stack(e.left), 1 + _max_stack(e.right))
    if isinstance(e, E.Not):
        return _max_stack(e.inner)
    if isinstance(e, E.Ite):
        return max(_max_stack(c) for c in e.children())
    raise TypeError(f"unknown node {e!r}")  # pragma: no cover


def compile_program(p: Program, columns: Mapping[str, int],
                    mark_var: Optional[str] = None) -> Code:
    """Compile p's body against a variable-to-column mapping.

    If mark_var is set, every read of that variable also raises the
    per-row mark flag, so callers can tell which rows reached it.
    """
    for name in p.params:
        if name not in columns:
            raise KeyError(f"no column for parameter {name!r}")
    em = _Emitter(columns, mark_var)
    em.expr(p.body)
    return Code(
        ops=np.asarray(em.ops, dtype=np.int32),
        iarg=np.asarray(em.iarg, dtype=np.int32),
        farg=np.asarray(em.farg, dtype=np.float64),
        stack_depth=max(1, _max_stack(p.body)),
        n_columns=max(columns.values()) + 1 if columns else 0,
    )
