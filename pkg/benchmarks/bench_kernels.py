"""Compiled kernels vs numpy fallback on the two hot loops.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from varosc import _backend, _fallback
from varosc.linalg import random_unitary
from varosc.rng import complex_gaussian, generator
from varosc.sequences import geometric_lacunary, window_owner


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    B = random_unitary(16, 1).entries
    f = complex_gaussian(generator(2), (16,))
    cps = np.array([1 << i for i in range(19)], dtype=np.int64)
    nk = np.array(geometric_lacunary(2, 30).terms, dtype=float)
    M = geometric_lacunary(3, 19).terms
    Mf = np.array(M, dtype=float)
    own = np.array(window_owner([int(x) for x in nk], list(M)))
    th = np.geomspace(1 / (10 * nk[-1]), math.pi, 100_000)
    return {
        "stream dim16 n=2^18": lambda k: k.stream_averages(B, f, cps, False),
        "variation grid 1e5 x K=30": lambda k: k.variation_grid(nk, th),
        "oscillation grid 1e5 x K=30, |M|=19": lambda k: k.oscillation_grid(nk, Mf, own, th),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    compiled = _backend.kernels if _backend.kernels is not _fallback else None
    print(f"{'case':40s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = best_of(lambda: fn(_fallback), args.repeat)
        if compiled is None:
            print(f"{name:40s} {tp:11.4f} {'n/a':>11s} {'n/a':>8s}")
            continue
        tc = best_of(lambda: fn(compiled), args.repeat)
        print(f"{name:40s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
