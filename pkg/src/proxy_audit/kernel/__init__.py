"""Evaluation kernel: bytecode compiler plus two interpreters.

The compiled extension (_core, Cython) is preferred; the pure-Python
interpreter (pyeval) is the fallback. Selection happens once at import.
Set PROXY_AUDIT_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os
from typing import Mapping, Optional

import numpy as np

from ..lang.program import Program
from .bytecode import Code, compile_program

if os.environ.get("PROXY_AUDIT_PURE") == "1":
    from . import pyeval as _impl
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        from . import pyeval as _impl
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def evaluate_matrix(code: Code, data: np.ndarray,
                    marks: Optional[np.ndarray] = None) -> np.ndarray:
    """Run compiled code over each row of `data` (float64, C order).

    Returns the per-row results; if `marks` (uint8, len = rows) is given
    it is filled with 1 where the code's mark variable was read.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-d array")
    if data.shape[1] < code.n_columns:
        raise ValueError(
            f"data has {data.shape[1]} columns, code needs {code.n_columns}")
    out = np.empty(data.shape[0], dtype=np.float64)
    _impl.run(code, data, out, marks)
    return out


def evaluate_program(p: Program, columns: Mapping[str, int],
                     data: np.ndarray) -> np.ndarray:
    """Compile and run in one step (convenience for one-shot callers)."""
    return evaluate_matrix(compile_program(p, columns), data)


__all__ = ["BACKEND", "Code", "backend_name", "compile_program",
           "evaluate_matrix", "evaluate_program"]
