"""Pure-Python bytecode interpreter, the fallback for kernel._core.

Same observable behavior as the compiled interpreter; used when the
extension is unavailable or when PROXY_AUDIT_PURE=1.
"""

from __future__ import annotations

import numpy as np

from ..errors import DivisionByZero
from . import bytecode as bc


def run(code, data: np.ndarray, out: np.ndarray, marks=None) -> None:
    ops = code.ops.tolist()
    iarg = code.iarg.tolist()
    farg = code.farg.tolist()
    n_ins = len(ops)
    n_rows = data.shape[0]
    stack = [0.0] * code.stack_depth
    for r in range(n_rows):
        row = data[r]
        sp = 0
        pc = 0
        marked = 0
        while pc < n_ins:
            op = ops[pc]
            if op == bc.CONST:
                stack[sp] = farg[pc]
                sp += 1
            elif op == bc.LOAD:
                stack[sp] = row[iarg[pc]]
                sp += 1
            elif op == bc.ADD:
                n = iarg[pc]
                acc = 0.0
                for i in range(sp - n, sp):
                    acc += stack[i]
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == bc.MUL:
                n = iarg[pc]
                acc = 1.0
                for i in range(sp - n, sp):
                    acc *= stack[i]
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == bc.SUB:
                sp -= 1
                stack[sp - 1] -= stack[sp]
            elif op == bc.DIV:
                sp -= 1
                if stack[sp] == 0.0:
                    raise DivisionByZero(row=r)
                stack[sp - 1] /= stack[sp]
            elif op == bc.AND:
                n = iarg[pc]
                acc = 1.0
                for i in range(sp - n, sp):
                    if stack[i] == 0.0:
                        acc = 0.0
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == bc.OR:
                n = iarg[pc]
                acc = 0.0
                for i in range(sp - n, sp):
                    if stack[i] != 0.0:
                        acc = 1.0
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == bc.NOT:
                stack[sp - 1] = 0.0 if stack[sp - 1] != 0.0 else 1.0
            elif op == bc.LE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] <= stack[sp] else 0.0
            elif op == bc.LT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] < stack[sp] else 0.0
            elif op == bc.EQ:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] == stack[sp] else 0.0
            elif op == bc.GE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] >= stack[sp] else 0.0
            elif op == bc.GT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] > stack[sp] else 0.0
            elif op == bc.JZ:
                sp -= 1
                if stack[sp] == 0.0:
                    pc = iarg[pc]
                    continue
            elif op == bc.JMP:
                pc = iarg[pc]
                continue
            elif op == bc.MARK:
                marked = 1
            else:  # pragma: no cover
                raise ValueError(f"bad opcode {op}")
            pc += 1
        out[r] = stack[0]
        if marks is not None:
            marks[r] = marked
