#!/usr/bin/env python3
"""Compare the compiled kernels against the numpy fallback.

Times each hot kernel on both backends at benchmark-sized inputs, checks
that the outputs agree and writes one CSV row per case.

    python3 benchmarks/bench_backends.py --repeat 5 --out bench_backends.csv
"""
import argparse
import csv
import sys
import time

import numpy as np

from pikl import _fallback, classic

try:
    from pikl import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    X1 = rng.uniform(-np.pi, np.pi, (1000, 1))
    X2 = rng.uniform(-0.5, 0.5, (100_000, 2))
    w1 = np.ones(len(X1), dtype=np.complex128)
    w2 = np.ones(len(X2), dtype=np.complex128)
    xs = np.linspace(0.0, 200.0, 200_001)
    l1, l2 = classic.split_grid(40_000)
    f0, left, right = classic.boundary_data(l1, l2, classic.NoisySpec(0.1, 1))
    f1 = classic.taylor_first_row(f0, left, right, l1, l2)
    keep = classic.rows_for(l1, np.linspace(0, 1, 101))
    r2 = classic.C2 * (l2 / l1) ** 2
    q = 2.0 * (l2 / l1) ** 2
    yield "bessel_j1 200k points", lambda k: k.bessel_j1(xs)
    yield "char_sums d=1 n=1e3 kmax=600", lambda k: k.char_sums(X1, w1, 600, (np.pi,))
    yield "char_sums d=2 n=1e5 kmax=40", lambda k: k.char_sums(X2, w2, 40, (0.5, 0.5))
    yield "euler n=4e4", lambda k: k.wave_leapfrog(f0, f1, left, right, r2, keep)
    yield "rk4 n=4e4", lambda k: k.wave_rk4(f0, np.zeros_like(f0), left, right, l2,
                                           classic.C2, keep)
    yield "crank_nicolson n=4e4", lambda k: k.wave_crank_nicolson(f0, f1, left, right,
                                                                  q, keep)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; reinstall with Cython available",
              file=sys.stderr)
        return 1
    rows = []
    for name, run in cases():
        t_py, ref = best_of(lambda: run(_fallback), args.repeat)
        t_cy, got = best_of(lambda: run(_kernels), args.repeat)
        scale = float(np.max(np.abs(ref))) or 1.0
        diff = float(np.max(np.abs(np.asarray(ref) - np.asarray(got)))) / scale
        rows.append([name, f"{t_py:.4f}", f"{t_cy:.4f}", f"{t_py / t_cy:.2f}",
                     f"{diff:.2e}"])
    header = ["case", "python_s", "cython_s", "speedup", "max_rel_diff"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    if args.out:
        fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
