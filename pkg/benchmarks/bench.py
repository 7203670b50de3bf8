"""Wall-clock timings for Witt structure polynomials and the acceptance criteria.

    python3 benchmarks/bench.py [--repeat N]
"""

import argparse
import statistics
import time

from unwindlab import witt
from unwindlab.suites import CRITERIA, run_criterion


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for p, n in ((2, 4), (3, 4), (5, 3), (3, 5)):
        t = timed(lambda: witt._compute(p, n, "P"), 1)
        print(f"witt product polynomials p={p} n={n}: {t:.3f} s (uncached)")
    for c in CRITERIA:
        t = timed(lambda: run_criterion(c), args.repeat)
        print(f"criterion {c.number} ({c.title}): median {t:.3f} s, limit {c.limit} s")


if __name__ == "__main__":
    main()
