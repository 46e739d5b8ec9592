"""Compare the compiled kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py``; prints timings and the
largest difference between the two backends.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from symplindex import kernels
from symplindex.symplectic import standard_form


def _best_of(fn, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_propagate(n: int, steps: int, repeat: int) -> dict:
    rng = np.random.default_rng(0)
    d = 2 * n
    j = standard_form(n)
    h = rng.standard_normal((steps, 2, d, d))
    h = h + np.swapaxes(h, -1, -2)
    a1, a2 = j.T @ h[:, 0], j.T @ h[:, 1]
    dt = 1.0 / steps
    py, cy = kernels.python_backend(), kernels.compiled_backend()
    out = {"n": n, "steps": steps, "python_s": _best_of(lambda: py.gl2_propagate(a1, a2, dt, j.T, 32, steps), repeat)}
    if cy is not None:
        out["cython_s"] = _best_of(lambda: cy.gl2_propagate(a1, a2, dt, j.T, 32, steps), repeat)
        diff = np.abs(py.gl2_propagate(a1, a2, dt, j.T, 32, steps) - cy.gl2_propagate(a1, a2, dt, j.T, 32, steps))
        out["max_abs_diff"] = float(diff.max())
    return out


def bench_assemble(n: int, elements: int, repeat: int) -> dict:
    rng = np.random.default_rng(1)
    p, q, r = (rng.standard_normal((elements, 3, n, n)) for _ in range(3))
    h = 1.0 / elements
    py, cy = kernels.python_backend(), kernels.compiled_backend()
    out = {"n": n, "elements": elements, "python_s": _best_of(lambda: py.assemble_p1(p, q, r, h), repeat)}
    if cy is not None:
        out["cython_s"] = _best_of(lambda: cy.assemble_p1(p, q, r, h), repeat)
        d1, u1 = py.assemble_p1(p, q, r, h)
        d2, u2 = cy.assemble_p1(p, q, r, h)
        out["max_abs_diff"] = float(max(np.abs(d1 - d2).max(), np.abs(u1 - u2).max()))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    if kernels.compiled_backend() is None:
        print("compiled kernels not built; only the fallback is timed")
    for n, steps in ((1, 4096), (2, 4096), (3, 2048)):
        res = bench_propagate(n, steps, args.repeat)
        print("propagate", _fmt(res))
    for n, elements in ((1, 512), (2, 512), (3, 256)):
        res = bench_assemble(n, elements, args.repeat)
        print("assemble ", _fmt(res))


def _fmt(res: dict) -> str:
    parts = [f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in res.items()]
    if "cython_s" in res:
        parts.append(f"speedup={res['python_s'] / res['cython_s']:.1f}x")
    return " ".join(parts)


if __name__ == "__main__":
    main()
