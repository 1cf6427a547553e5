"""Compiled kernels vs. the pure-Python fallback on the same transforms.

Run with ``python3 benchmarks/bench_backends.py``. Prints one row per
(backend, N, method) and the python/compiled speed ratio per N.
"""
import sys

from dse import bench


def main(argv=None):
    n_list = tuple(int(a) for a in (argv or sys.argv[1:])) or (1024, 4096, 16384)
    records = bench.compare_backends(n_list=n_list)
    print(f"{'backend':<9} {'method':<14} {'N':>6} {'median_ms':>10}")
    times = {}
    for r in records:
        times[(r.backend, r.method, r.n)] = r.apply_ns_median
        print(f"{r.backend:<9} {r.method:<14} {r.n:>6} {r.apply_ns_median / 1e6:>10.3f}")
    for n in n_list:
        c, p = times.get(("compiled", "dse", n)), times.get(("python", "dse", n))
        if c and p:
            print(f"N={n}: python/compiled dse ratio {p / c:.2f}")


if __name__ == "__main__":
    main()
