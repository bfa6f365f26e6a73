"""Time the compiled multiprecision kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--bits 256] [--dims 4 8 16] [--repeat 3]

Prints one line per (kernel, dimension) with the best wall time of each
backend, their speedup and the largest entrywise difference between the two.
"""

import argparse
import sys
import time

import gmpy2
import numpy as np

from ddsim import kernels


def random_hermitian(dim, rng, bits):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    with gmpy2.context(precision=bits):
        return np.array([[gmpy2.mpc(complex(v)) for v in row] for row in h], dtype=object)


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    return max((float(abs(x - y)) for x, y in zip(np.ravel(a), np.ravel(b))), default=0.0)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("--dims", type=int, nargs="+", default=[4, 8, 16])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<8}{'dim':>5}{'compiled_s':>14}{'python_s':>14}{'speedup':>10}{'max_diff':>12}")
    for dim in args.dims:
        a = random_hermitian(dim, rng, args.bits)
        b = random_hermitian(dim, rng, args.bits)
        d = np.array([gmpy2.mpfr(x) for x in rng.normal(size=dim)], dtype=object)
        cases = {
            "matmul": lambda m: m.matmul(a, b, args.bits),
            "eigh": lambda m: m.eigh(a, args.bits),
            "vdv": lambda m: m.vdv(a, d, args.bits),
        }
        for name, call in cases.items():
            tc, oc = best_time(lambda: call(kernels.compiled), args.repeat)
            tp, op = best_time(lambda: call(kernels.fallback), args.repeat)
            diff = max_diff(oc, op) if name != "eigh" else max_diff(oc[0], op[0])
            print(f"{name:<8}{dim:>5}{tc:>14.5f}{tp:>14.5f}{tp / tc:>10.1f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
