"""Compare the numba kernels with the pure numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 20000] [--pairs 20000] [--repeat 3]
"""

import argparse

from treeroute.bench import format_bench, run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--points", type=int, default=1500)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    print(format_bench(run_bench(a.repeat, n=a.n, k=a.k, pairs=a.pairs, points=a.points)), end="")


if __name__ == "__main__":
    main()
