#!/usr/bin/env python3
"""Benchmark the compiled chain kernel against the pure-Python fallback.

Evaluates h, h' and the alignment residual on a uniform grid over
[0, horizon] for the mild and near-critical sinusoidal delays with the
quadratic seed, times both backends, and checks that they agree.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from fixdelay import SeedConstraints, TimeTransform, available_backends, quadratic_seed
from fixdelay import catalog


def run_case(name, delay, horizon, n_grid):
    c = SeedConstraints.from_delay(delay, 1.0)
    seed = quadratic_seed(c)
    lams = np.linspace(0.0, horizon, n_grid)
    results = {}
    print(f"\n{name}: horizon {horizon:g}, {n_grid} grid points")
    for backend in available_backends():
        tt = TimeTransform(delay, seed, 1.0, backend=backend)
        start = time.perf_counter()
        trace = tt.grid_eval(lams)
        elapsed = time.perf_counter() - start
        results[backend] = (trace, elapsed)
        print(f"  {backend:<8}: {elapsed * 1e3:9.1f} ms   "
              f"max h' = {trace.max_h_prime:.6f}   "
              f"max |abel| = {trace.max_abel_residual:.2e}")
    if len(results) == 2:
        (tr_a, t_a), (tr_b, t_b) = results["c"], results["python"]
        dh = np.max(np.abs(tr_a.h - tr_b.h))
        dhp = np.max(np.abs(tr_a.h_prime - tr_b.h_prime))
        print(f"  agreement: |dh| <= {dh:.2e}, |dh'| <= {dhp:.2e}, "
              f"speedup {t_b / t_a:.1f}x")
        assert dh < 1e-8 and dhp < 1e-6, "backends disagree"
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller grids for a fast sanity run")
    args = parser.parse_args()
    n = 1000 if args.quick else 10_000
    horizon = 50.0 if args.quick else 100.0
    print(f"available backends: {', '.join(available_backends())}")
    run_case("mild sinusoid", catalog.mild_sinusoid(), horizon, n)
    run_case("near-critical sinusoid", catalog.near_critical_sinusoid(), horizon, n)


if __name__ == "__main__":
    main()
