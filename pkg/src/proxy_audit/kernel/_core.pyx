# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bytecode interpreter for per-row program evaluation."""

import numpy as np
cimport numpy as cnp

from ..errors import DivisionByZero

DEF OP_CONST = 0
DEF OP_LOAD = 1
DEF OP_ADD = 2
DEF OP_MUL = 3
DEF OP_SUB = 4
DEF OP_DIV = 5
DEF OP_AND = 6
DEF OP_OR = 7
DEF OP_NOT = 8
DEF OP_LE = 9
DEF OP_LT = 10
DEF OP_EQ = 11
DEF OP_GE = 12
DEF OP_GT = 13
DEF OP_JZ = 14
DEF OP_JMP = 15
DEF OP_MARK = 16


def run(code, cnp.ndarray[cnp.float64_t, ndim=2] data,
        cnp.ndarray[cnp.float64_t, ndim=1] out, marks=None):
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ops = code.ops
    cdef cnp.ndarray[cnp.int32_t, ndim=1] iarg = code.iarg
    cdef cnp.ndarray[cnp.float64_t, ndim=1] farg = code.farg
    cdef int n_ins = ops.shape[0]
    cdef Py_ssize_t n_rows = data.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] stack = \
        np.empty(code.stack_depth, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mk
    cdef bint want_marks = marks is not None
    if want_marks:
        mk = marks
    cdef Py_ssize_t r
    cdef int pc, sp, op, n, i, marked, bad_row
    cdef double acc

    bad_row = -1
    for r in range(n_rows):
        sp = 0
        pc = 0
        marked = 0
        while pc < n_ins:
            op = ops[pc]
            if op == OP_CONST:
                stack[sp] = farg[pc]
                sp += 1
            elif op == OP_LOAD:
                stack[sp] = data[r, iarg[pc]]
                sp += 1
            elif op == OP_ADD:
                n = iarg[pc]
                acc = 0.0
                for i in range(sp - n, sp):
                    acc += stack[i]
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == OP_MUL:
                n = iarg[pc]
                acc = 1.0
                for i in range(sp - n, sp):
                    acc *= stack[i]
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == OP_SUB:
                sp -= 1
                stack[sp - 1] -= stack[sp]
            elif op == OP_DIV:
                sp -= 1
                if stack[sp] == 0.0:
                    bad_row = <int>r
                    break
                stack[sp - 1] /= stack[sp]
            elif op == OP_AND:
                n = iarg[pc]
                acc = 1.0
                for i in range(sp - n, sp):
                    if stack[i] == 0.0:
                        acc = 0.0
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == OP_OR:
                n = iarg[pc]
                acc = 0.0
                for i in range(sp - n, sp):
                    if stack[i] != 0.0:
                        acc = 1.0
                sp -= n - 1
                stack[sp - 1] = acc
            elif op == OP_NOT:
                stack[sp - 1] = 0.0 if stack[sp - 1] != 0.0 else 1.0
            elif op == OP_LE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] <= stack[sp] else 0.0
            elif op == OP_LT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] < stack[sp] else 0.0
            elif op == OP_EQ:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] == stack[sp] else 0.0
            elif op == OP_GE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] >= stack[sp] else 0.0
            elif op == OP_GT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] > stack[sp] else 0.0
            elif op == OP_JZ:
                sp -= 1
                if stack[sp] == 0.0:
                    pc = iarg[pc]
                    continue
            elif op == OP_JMP:
                pc = iarg[pc]
                continue
            else:  # OP_MARK
                marked = 1
            pc += 1
        if bad_row >= 0:
            raise DivisionByZero(row=bad_row)
        out[r] = stack[0]
        if want_marks:
            mk[r] = <cnp.uint8_t>marked
