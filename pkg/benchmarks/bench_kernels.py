"""Time the compiled split kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--rows 5000] [--repeat 5]

Reports the raw ``split_gains`` kernel on one large node and a full
``build_tree`` on tie-heavy synthetic data, once per available backend.
"""

import argparse
import time
from contextlib import contextmanager

import numpy as np

from bttree import induction, kernels
from bttree.evaluation import generate_tie_heavy


@contextmanager
def backend(module):
    saved = induction.kernels.split_gains, induction.kernels.outcome_counts
    induction.kernels.split_gains = module.split_gains
    induction.kernels.outcome_counts = module.outcome_counts
    try:
        yield
    finally:
        induction.kernels.split_gains, induction.kernels.outcome_counts = saved


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=5000)
    parser.add_argument("--attributes", type=int, default=8)
    parser.add_argument("--values", type=int, default=4)
    parser.add_argument("--outcomes", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    X = rng.integers(args.values, size=(args.rows, args.attributes)).astype(np.int32)
    y = rng.integers(args.outcomes, size=args.rows).astype(np.int32)
    rows = np.arange(args.rows, dtype=np.int64)
    attrs = np.arange(args.attributes, dtype=np.int64)
    n_values = np.full(args.attributes, args.values, dtype=np.int32)
    ds = generate_tie_heavy(args.rows, args.attributes, args.values, args.outcomes, 0.5, seed=0)

    found = kernels.available_backends()
    print(f"import-time backend: {kernels.BACKEND}")
    print(f"rows={args.rows} attributes={args.attributes} values={args.values} "
          f"outcomes={args.outcomes} (best of {args.repeat})")
    results = {}
    for name, module in sorted(found.items()):
        t_kernel = best_of(
            lambda: module.split_gains(X, y, rows, attrs, n_values, args.outcomes), args.repeat
        )
        with backend(module):
            t_build = best_of(lambda: induction.build_tree(ds), args.repeat)
        results[name] = (t_kernel, t_build)
        print(f"{name:>7}  split_gains {t_kernel * 1e3:9.3f} ms   build_tree {t_build * 1e3:9.3f} ms")
    if len(results) == 2:
        (ck, cb), (pk, pb) = results["cython"], results["python"]
        print(f"speedup  split_gains x{pk / ck:.1f}   build_tree x{pb / cb:.1f}")


if __name__ == "__main__":
    main()
