"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends must produce identical arrays; the script checks this before
reporting times.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fintripos import _kernels_py
from fintripos.order import boolean, chain, lower_sets, vee_poset
from fintripos.finset import finset
from fintripos.percat import nabla

try:
    from fintripos import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases():
    two, b4 = chain(2), boolean(2)
    low_v, _ = lower_sets(vee_poset())
    cases = [
        ("enumerate_pers n=3 over B4", "enumerate_pers", (3, b4.code)),
        ("enumerate_pers n=3 over low(V)", "enumerate_pers", (3, low_v.code)),
        ("enumerate_pers n=5 over 2", "enumerate_pers", (5, two.code)),
        ("enumerate_pers n=4 over B4", "enumerate_pers", (4, b4.code)),
    ]
    X = nabla(finset("A", 3), low_v)
    Y = nabla(finset("B", 3), low_v)
    cases.append(("enumerate_funrels 3x3 over low(V)", "enumerate_funrels", (X.code_matrix(), Y.code_matrix(), low_v.code)))
    rng = np.random.default_rng(0)
    n = 200_000
    src = rng.integers(0, n, size=4 * n)
    dst = rng.integers(0, n, size=4 * n)
    cases.append(("classify_names 2e5 nodes 8e5 edges", "classify_names", (n, src, dst)))
    return cases


def _time(fn, args, repeat: int) -> tuple[float, np.ndarray]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'case':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, kernel, kargs in _cases():
        tp, outp = _time(getattr(_kernels_py, kernel), kargs, args.repeat)
        if _compiled is None:
            print(f"{name:40s} {tp:10.4f} {'-':>10s} {'-':>8s}")
            continue
        tc, outc = _time(getattr(_compiled, kernel), kargs, args.repeat)
        if not np.array_equal(outp, outc):
            print(f"{name:40s} MISMATCH between backends")
            return 1
        print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
