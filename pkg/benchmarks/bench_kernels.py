#!/usr/bin/env python3
"""Time the numba kernel against the pure-numpy fallback.

Both paths consume identical draw sequences, so besides timing them this
script asserts their outputs are bit-identical.  Run:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from smurf import kernels
from smurf.core import gate_keys


def bench(m, n, length, burn_in=1000, repeats=3, seed=1234):
    rng = np.random.RandomState(seed)
    weights = rng.uniform(0, 1, n**m)
    pxs = rng.uniform(0.1, 0.9, m)
    mode, ikeys, okeys = gate_keys("independent", seed, m, n**m)
    args = (mode, ikeys, okeys, pxs, weights, np.full(m, n),
            np.zeros(m, dtype=np.int64), burn_in, length)

    results = {}
    for impl in ("numba", "numpy"):
        if impl == "numba" and not kernels.HAVE_NUMBA:
            results[impl] = (None, None)
            continue
        kernels.simulate(*args, impl=impl)  # warm-up / JIT compile
        best = float("inf")
        out = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = kernels.simulate(*args, impl=impl)
            best = min(best, time.perf_counter() - t0)
        results[impl] = (best, out)

    t_nb, out_nb = results["numba"]
    t_np, out_np = results["numpy"]
    if out_nb is not None:
        assert out_nb[0] == out_np[0], "kernel outputs diverged"
        assert np.array_equal(out_nb[1], out_np[1])
    cycles = burn_in + length
    line = f"M={m} N={n} L={length:>9,}"
    if t_nb is not None:
        line += f"  numba {t_nb * 1e3:9.2f} ms ({cycles / t_nb / 1e6:7.1f} Mcyc/s)"
    else:
        line += "  numba       (unavailable)"
    line += f"  numpy {t_np * 1e3:9.2f} ms ({cycles / t_np / 1e6:7.1f} Mcyc/s)"
    if t_nb is not None:
        line += f"  speedup {t_np / t_nb:6.1f}x"
    print(line)


def main():
    print(f"active implementation: {kernels.active_impl()}")
    print("machine simulation, recorded cycles + 1000 burn-in, best of 3:")
    for m, n, length in [
        (1, 4, 10**5),
        (2, 4, 10**5),
        (2, 4, 10**6),
        (3, 4, 10**6),
        (3, 8, 10**6),
    ]:
        bench(m, n, length)


if __name__ == "__main__":
    main()
