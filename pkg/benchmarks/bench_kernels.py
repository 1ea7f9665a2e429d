"""Compare the compiled and pure-Python transportation kernels.

    python benchmarks/bench_kernels.py [--sizes 10 25 50 100] [--repeat 3]

Times both backends on the same random instances (unit-supply assignment
problems and multiplicity-compressed ones), checks that they return the
same flow, and prints a table. A second block times end-to-end
``wasserstein`` calls with each backend swapped in.
"""

import argparse
import random
import statistics
import time

import numpy as np

from pdspace import Diagram, kernels, make_space, wasserstein


def _time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def assignment_instance(rng, n):
    cost = rng.random((n, n))
    ones = np.ones(n, dtype=np.int64)
    return cost, ones, ones


def compressed_instance(rng, n, max_mult=50):
    cost = rng.random((n, n))
    supply = rng.integers(1, max_mult, size=n)
    demand = rng.multinomial(int(supply.sum()), np.ones(n) / n)
    return cost, supply, demand


def bench_kernels(sizes, repeat, seed=0):
    rng = np.random.default_rng(seed)
    names = sorted(kernels.BACKENDS)
    print(f"{'instance':<14}{'n':>5}" + "".join(f"{k + ' (ms)':>16}" for k in names) + f"{'speedup':>10}")
    for label, make in (("assignment", assignment_instance), ("compressed", compressed_instance)):
        for n in sizes:
            inst = make(rng, n)
            flows = {k: kernels.BACKENDS[k](*inst)[0] for k in names}
            ref = flows[names[0]]
            assert all(np.array_equal(ref, f) for f in flows.values()), "backends disagree"
            times = {k: _time(lambda k=k: kernels.BACKENDS[k](*inst), repeat) for k in names}
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{label:<14}{n:>5}" + "".join(f"{times[k] * 1e3:>16.3f}" for k in names)
                  + f"{speed:>9.1f}x")


def bench_wasserstein(sizes, repeat, seed=1):
    rng = random.Random(seed)
    sp = make_space("halfplane:l2")

    def diagram(n):
        pts = []
        for _ in range(n):
            b = rng.uniform(0, 10)
            pts.append((b, b + rng.uniform(0.1, 5)))
        return Diagram.from_points(sp, pts)

    names = sorted(kernels.BACKENDS)
    print()
    print(f"{'wasserstein':<14}{'n':>5}" + "".join(f"{k + ' (ms)':>16}" for k in names))
    saved = kernels.transport
    try:
        for n in sizes:
            a, b = diagram(n), diagram(n)
            times, values = {}, {}
            for k in names:
                kernels.transport = kernels.BACKENDS[k]
                for p in (2.0, float("inf")):
                    values[k, p] = wasserstein(a, b, p).value
                times[k] = _time(lambda: wasserstein(a, b, 2.0), repeat)
            for p in (2.0, float("inf")):
                assert len({values[k, p] for k in names}) == 1, "backends disagree"
            print(f"{'W_2':<14}{n:>5}" + "".join(f"{times[k] * 1e3:>16.3f}" for k in names))
    finally:
        kernels.transport = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    bench_kernels(args.sizes, args.repeat)
    bench_wasserstein(args.sizes, args.repeat)


if __name__ == "__main__":
    main()
