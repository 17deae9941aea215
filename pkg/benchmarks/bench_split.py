"""Time tree construction and a short training run on each split backend.

Usage: python benchmarks/bench_split.py [--n 20000] [--d 20] [--repeat 3] [--threads 1]
"""

import argparse
import time

import numpy as np

from frugalboost import _kernels
from frugalboost.boosting import TrainConfig, train
from frugalboost.cart import TreeBuilder
from frugalboost.synthetic import random_regression


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--d", type=int, default=20)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--iterations", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    ds, sched = random_regression(args.n, args.d, seed=0)
    r = ds.labels - ds.labels.mean()
    pen = np.zeros(args.d)
    print(f"n={args.n} d={args.d} depth={args.depth} threads={args.threads}")
    print(f"{'backend':<10}{'tree (s)':>12}{'train (s)':>12}")
    reference = None
    for name in _kernels.available_backends():
        kernel = _kernels.load_backend(name)
        builder = TreeBuilder(ds.features, args.threads, kernel)
        t_tree, tree = best_of(lambda: builder.build(r, pen, args.depth), args.repeat)
        old = _kernels.backend
        _kernels.backend = kernel
        try:
            cfg = TrainConfig(iterations=args.iterations, lam=1.0, depth=args.depth, n_threads=args.threads)
            t_train, (ens, _) = best_of(lambda: train(ds, sched, cfg), 1)
        finally:
            _kernels.backend = old
        same = reference is None or (tree.equals(reference[0]) and all(
            a[0].equals(b[0]) for a, b in zip(ens.iterations, reference[1].iterations)))
        reference = reference or (tree, ens)
        print(f"{name:<10}{t_tree:>12.4f}{t_train:>12.3f}   identical={same}")


if __name__ == "__main__":
    main()
