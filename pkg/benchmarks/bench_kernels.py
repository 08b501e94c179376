#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python backend.

Times the three hot paths (bid-curve integration, exit-price root batches,
clock playout) plus one end-to-end starting-price optimization on each
backend and prints a speedup table.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

import flowerauction as fa
from flowerauction import _kernels as kernels


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name, repeat):
    kernels.set_backend(name)
    cfg = fa.MarketConfig(n=2, cost=fa.TimeCostSpec(fa.CostKind.LINEAR, 0.5))
    cfg10 = fa.MarketConfig(n=10, cost=fa.TimeCostSpec(fa.CostKind.HYPERBOLIC, 0.7))
    rng = np.random.default_rng(0)

    out = {}
    out["dutch_curve n=2 (2000 steps)"] = _best_of(
        lambda: kernels.dutch_curve(2, 0, 1, 0.5, 0.462, 1.0, 2000), repeat)
    out["dutch_curve n=10 (2000 steps)"] = _best_of(
        lambda: kernels.dutch_curve(10, 0, 3, 0.7, 0.8, 1.0, 2000), repeat)

    v = rng.uniform(0.0, 1.0, 1_000_000)
    out["english_exit_batch 1e6 (hyperbolic)"] = _best_of(
        lambda: kernels.english_exit_batch(v, 0.4, 3, 0.7), repeat)

    prof = fa.solve_profile(cfg, 0.462)
    values = rng.uniform(0.0, 1.0, (1_000_000, 2))
    bids = prof.bid_price(np.minimum(values, prof.cutoff))
    exits = prof.exit_price(values)
    tie = rng.uniform(0.0, 1.0, 1_000_000)
    out["play_auctions 1e6 x n=2"] = _best_of(
        lambda: kernels.play_auctions(values, bids, exits, prof.cutoff,
                                      prof.s, 1e-4, tie), repeat)

    out["optimize auctioneer n=2 (end to end)"] = _best_of(
        lambda: fa.optimize_starting_price(cfg, fa.Objective.AUCTIONEER),
        max(1, repeat // 2))
    out["monte_carlo 1e6 n=10 (end to end)"] = _best_of(
        lambda: fa.monte_carlo(cfg10, fa.solve_profile(cfg10, 0.8),
                               1_000_000, seed=1), max(1, repeat // 2))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = fa.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; benchmarking python only")
    original = fa.backend_name()
    try:
        results = {name: bench_backend(name, args.repeat) for name in backends}
    finally:
        kernels.set_backend(original)

    names = list(next(iter(results.values())))
    width = max(len(n) for n in names)
    header = f"{'kernel'.ljust(width)}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n in names:
        line = n.ljust(width) + "  "
        line += "".join(f"{results[b][n] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{results['python'][n] / results['compiled'][n]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
