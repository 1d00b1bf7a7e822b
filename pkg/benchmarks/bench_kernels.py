"""Compare the numba and numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 7] [--sizes 1024,16384,262144]

Each kernel is timed on both backends after a warm-up call (so numba
compile time is excluded) and checked for agreement.
"""
import argparse
import timeit

import numpy as np

from cesaro_lab import _kernels


def _cases(n, rng):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z = np.exp(2j * np.pi * rng.random(64))
    return {
        "prefix_scan": ((0.9, x), _kernels.prefix_scan_numba, _kernels.prefix_scan_numpy),
        "horner": ((x, z), _kernels.horner_numba, _kernels.horner_numpy),
        "eigen_recursion": ((0.9, 5, n), _kernels.eigen_recursion_numba, _kernels.eigen_recursion_numpy),
    }


def best_of(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--sizes", default="1024,16384,262144")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'n':>9}{'numba [ms]':>13}{'numpy [ms]':>13}{'ratio':>8}{'max diff':>11}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, (fargs, fast, slow) in _cases(n, rng).items():
            a, b = fast(*fargs), slow(*fargs)
            diff = float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))
            tf, ts = best_of(fast, fargs, args.repeat), best_of(slow, fargs, args.repeat)
            print(f"{name:<16}{n:>9}{tf * 1e3:>13.3f}{ts * 1e3:>13.3f}{ts / tf:>8.1f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
