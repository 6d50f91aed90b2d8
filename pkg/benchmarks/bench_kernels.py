"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times score evaluation (the search inner loop) and a short search run.
"""
import argparse
import timeit

import numpy as np

from simulbell import kernels
from simulbell.search_opt import SearchConfig, minimize_score
from simulbell.spin_ops import HALF, ONE, generic_direction
from simulbell.tensor_core import StateVector
from simulbell.uniqueness import ScoreEvaluator


def _dirs(k, seed=0):
    rng = np.random.default_rng(seed)
    return tuple(generic_direction(rng) for _ in range(k))


def _score_case(n, spin, k):
    rng = np.random.default_rng(1)
    dim = spin.dim**n
    amps = StateVector.normalized(rng.standard_normal(dim) + 1j * rng.standard_normal(dim), n, spin.dim).amplitudes
    ev = ScoreEvaluator(n, spin, _dirs(k), 1e-9)
    return lambda: ev(amps)


CASES = [
    ("score n=4 j=1/2 k=4", _score_case(4, HALF, 4), 2000),
    ("score n=6 j=1/2 k=3", _score_case(6, HALF, 3), 500),
    ("score n=4 j=1 k=3", _score_case(4, ONE, 3), 500),
    (
        "search n=4 j=1/2 unrestricted k=3",
        lambda: minimize_score(SearchConfig(4, HALF, _dirs(3), restricted=False, restarts=2, max_iter=100, seed=0)),
        1,
    ),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = sorted(kernels.BACKENDS)
    print(f"{'case':38s}" + "".join(f"{b:>14s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn, number in CASES:
        times = {}
        for b in backends:
            kernels.use_backend(b)
            fn()  # warm caches
            times[b] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        row = f"{name:38s}" + "".join(f"{times[b] * 1e6:12.1f}us" for b in backends)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
