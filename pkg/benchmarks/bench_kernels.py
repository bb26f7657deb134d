"""Time the numba kernels against the numpy fallbacks.

    python benchmarks/bench_kernels.py [--rows 64 256 1024] [--repeat 20]

Both kernel tables are called directly, so the result does not depend on
MILCHECK_BACKEND. Compilation happens in a warm-up call before timing.
"""

import argparse
import time

import numpy as np

from milcheck._kernels import NUMBA_KERNELS, NUMPY_KERNELS


def _inputs(name, rows, rng):
    codes = lambda k: rng.integers(0, k, rows).astype(np.int64)
    if name == "dep":
        x = codes(8)
        return (x, x % 3)  # holds, so every row pair is visited
    if name == "indep":
        return (codes(4), codes(2), codes(4))
    if name in ("inc", "exc"):
        return (codes(64), codes(64))
    n = max(4, rows // 16)
    a1 = rng.random((n, n)) < 0.2
    a2 = rng.random((n, n)) < 0.2
    return (np.ones((n, n), dtype=np.bool_), a1, a2)


def _time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if NUMBA_KERNELS is None:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':8} {'rows':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name in NUMPY_KERNELS:
        for rows in args.rows:
            inp = _inputs(name, rows, rng)
            a = NUMPY_KERNELS[name](*inp)
            b = NUMBA_KERNELS[name](*inp)
            assert np.array_equal(np.asarray(a), np.asarray(b)), name
            t_np = _time(NUMPY_KERNELS[name], inp, args.repeat)
            t_nb = _time(NUMBA_KERNELS[name], inp, args.repeat)
            print(f"{name:8} {rows:6d} {t_np * 1e3:10.3f} {t_nb * 1e3:10.3f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
