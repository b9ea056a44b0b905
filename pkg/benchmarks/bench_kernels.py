"""Compare the compiled kernel against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--rows 20000] [--repeat 5]

Evaluates a moderately deep decision-tree program over a synthetic
population with both interpreters and reports rows/second.
"""

import argparse
import time

import numpy as np

from proxy_audit.kernel import backend_name, bytecode, pyeval
from proxy_audit.lang.parser import parse_program

try:
    from proxy_audit.kernel import _core
except ImportError:
    _core = None

PROGRAM = (
    "lambda a, b, c, d. "
    "ite(a + 2.0 * b <= 1.0, "
    "    ite(c <= 0.5, ite(d <= 0.25, 0.0, 1.0), ite(b <= 0.5, 1.0, 0.0)), "
    "    ite(d * c <= 0.1, ite(a <= 0.75, 1.0, 0.0), ite(c + d <= 1.0, 0.0, 1.0)))"
)


def bench(impl, code, data, repeat):
    out = np.empty(data.shape[0])
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        impl.run(code, data, out, None)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    data = np.ascontiguousarray(rng.random((args.rows, 4)))
    program = parse_program(PROGRAM)
    code = bytecode.compile_program(program, {"a": 0, "b": 1, "c": 2, "d": 3})

    print(f"active backend: {backend_name()}")
    t_py, out_py = bench(pyeval, code, data, args.repeat)
    print(f"pure python : {t_py:.4f}s  ({args.rows / t_py:,.0f} rows/s)")
    if _core is None:
        print("compiled    : extension not built")
        return
    t_c, out_c = bench(_core, code, data, args.repeat)
    print(f"compiled    : {t_c:.4f}s  ({args.rows / t_c:,.0f} rows/s)")
    assert np.array_equal(out_py, out_c), "backends disagree"
    print(f"speedup     : {t_py / t_c:.1f}x (outputs identical)")


if __name__ == "__main__":
    main()
