"""Acceptance gate: one test per criterion, printed item by item.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line.

Known-red items, kept faithful rather than loosened: in the two-bidder
walkthrough the published bidder gain (+58% vs the descending benchmark)
and, in the reference ratio table, the buyer/welfare cells at high n or
high mu disagree with the defining utility integrals (the published welfare
cell at n=10, mu=0.7 would even exceed the hard bound E[c * v_max] <=
E[v_max] = 10/11).  The companion ``test_consistency_*`` tests pin this
package's values for those cells against independent closed-form +
adaptive-quadrature oracles, which also agree with the Monte Carlo runs in
criterion 7.
"""
import time

import numpy as np
import pytest

from flowerauction import (CostKind, MarketConfig, NumericalSettings, Objective,
                           TimeCostSpec, auction_metrics, best_response_gap,
                           english_exit, english_exit_numeric, monte_carlo,
                           optimize_starting_price, solve_dutch_curve,
                           solve_profile, threshold_s_tilde)
from flowerauction.reproduce import reproduce_example, reproduce_table1

import oracles


def _print_items(criterion, items):
    for it in items:
        mark = "PASS" if it.passed else "FAIL"
        print(f"[{mark}] {criterion} {it.name}: target {it.target} "
              f"computed {it.computed} ({it.tolerance})")
    ok = sum(1 for it in items if it.passed)
    print(f"[{'PASS' if ok == len(items) else 'FAIL'}] {criterion}: "
          f"{ok}/{len(items)} checks passed")


def test_criterion_1_illustrative_example():
    t0 = time.perf_counter()
    items, _ = reproduce_example()
    elapsed = time.perf_counter() - t0
    _print_items("criterion-1", items)
    print(f"criterion-1 runtime: {elapsed:.2f}s (limit 10s)")
    assert elapsed <= 10.0
    assert all(it.passed for it in items), \
        [it.name for it in items if not it.passed]


def test_criterion_2_reference_ratio_table():
    t0 = time.perf_counter()
    items, _ = reproduce_table1(threads=4)
    elapsed = time.perf_counter() - t0
    _print_items("criterion-2", items)
    print(f"criterion-2 runtime: {elapsed:.2f}s (limit 120s)")
    assert elapsed <= 120.0
    assert all(it.passed for it in items), \
        [it.name for it in items if not it.passed]


def test_criterion_3_payoff_equivalence():
    for n in (2, 3, 10):
        cfg = MarketConfig(n=n)  # no time cost
        vals = [auction_metrics(cfg, solve_profile(cfg, s, s_tilde=1.0)).eu_auctioneer
                for s in np.linspace(0.0, 1.0, 11)]
        spread = max(vals) - min(vals)
        expect = (n - 1) / (n + 1)
        worst = max(abs(v - expect) for v in vals)
        print(f"[{'PASS' if spread <= 1e-3 and worst <= 1e-3 else 'FAIL'}] "
              f"criterion-3 n={n}: spread {spread:.2e} (<=1e-3), "
              f"max dev from {expect:.6f}: {worst:.2e} (<=1e-3)")
        assert spread <= 1e-3
        assert worst <= 1e-3


def test_criterion_4_closed_form_oracles():
    dense = np.linspace(0.0, 1.0, 5001)
    for n in (2, 3, 10):
        cfg = MarketConfig(n=n)
        curve = solve_dutch_curve(cfg, 1.0, 1.0)
        err = np.abs(curve.price(dense) - (n - 1) * dense / n).max()
        print(f"[{'PASS' if err <= 1e-6 else 'FAIL'}] criterion-4 "
              f"no-cost curve n={n}: max err {err:.2e} (<=1e-6)")
        assert err <= 1e-6
    cfg = MarketConfig(n=2, cost=TimeCostSpec(CostKind.LINEAR, 0.5))
    worst = 0.0
    for s in (0.0, 0.2, 0.462, 0.7, 1.0):
        for v in np.linspace(0.0, 1.0, 41):
            closed = (1.0 + 0.5 * s) * v / (1.0 + 0.5 * v)
            worst = max(worst,
                        abs(english_exit(cfg, v, s) - closed),
                        abs(english_exit_numeric(cfg, v, s) - closed))
    print(f"[{'PASS' if worst <= 1e-10 else 'FAIL'}] criterion-4 "
          f"linear exit vs closed form: max err {worst:.2e} (<=1e-10)")
    assert worst <= 1e-10


def test_criterion_5_comparative_statics():
    rng = np.random.default_rng(20240809)
    kinds = [CostKind.LINEAR, CostKind.EXPONENTIAL, CostKind.HYPERBOLIC]
    ds = 1e-4
    for i in range(20):
        kind = kinds[int(rng.integers(0, 3))]
        mu = float(rng.uniform(0.05, 0.9))
        n = int(rng.integers(2, 11))
        cfg = MarketConfig(n=n, cost=TimeCostSpec(kind, mu))
        st = threshold_s_tilde(cfg)

        # bid curve moves down in s, less than one-for-one
        s = float(rng.uniform(0.05, 0.9))
        lo = solve_profile(cfg, s, s_tilde=st)
        hi = solve_profile(cfg, s + ds, s_tilde=st)
        vv = np.linspace(1e-2, min(lo.cutoff, hi.cutoff) * 0.999, 50)
        fd_b = (hi.bid_price(vv) - lo.bid_price(vv)) / ds
        assert fd_b.max() < 1.0
        assert fd_b.max() < 0.0  # strict decrease for v > 0

        # exit price moves up in s, less than one-for-one
        from flowerauction import exit_prices
        fd_m = (exit_prices(cfg, vv, s + ds) - exit_prices(cfg, vv, s)) / ds
        assert fd_m.min() >= 0.0
        assert fd_m.max() < 1.0

        # cutoff nondecreasing, pinned at 1 beyond the waiting threshold
        from flowerauction import cutoff as cutoff_fn
        s_grid = np.linspace(0.0, 1.0, 101)
        p_grid = np.array([cutoff_fn(cfg, float(sv)) for sv in s_grid])
        assert np.all(np.diff(p_grid) >= -1e-9)
        beyond = s_grid >= st + 1e-3
        assert np.all(p_grid[beyond] == 1.0)

        # b(p, s) = s where the cutoff is interior (fresh dense grid)
        interior = (p_grid < 1.0) & (s_grid > 0.0)
        if interior.any():
            j = int(np.flatnonzero(interior)[-1])
            cfg_dense = MarketConfig(n=n, cost=TimeCostSpec(kind, mu),
                                     num=NumericalSettings(ode_steps=4096))
            curve = solve_dutch_curve(cfg_dense, float(s_grid[j]),
                                      float(p_grid[j]) * (1.0 - 1e-9))
            assert abs(curve.bids[-1] - s_grid[j]) <= 1e-6
        print(f"[PASS] criterion-5 config {i + 1}/20: {kind.value} mu={mu:.3f} "
              f"n={n} (db/ds in [{fd_b.min():.3f},{fd_b.max():.3f}], "
              f"dm/ds in [{fd_m.min():.3f},{fd_m.max():.3f}])")


def test_criterion_6_interior_optima_and_slopes():
    ds = 1e-4
    for mu in (0.1, 0.4, 0.7):
        for n in (2, 5, 10):
            cfg = MarketConfig(n=n, cost=TimeCostSpec(CostKind.LINEAR, mu))
            st = threshold_s_tilde(cfg)
            for objective in Objective:
                res = optimize_starting_price(cfg, objective)
                assert 0.0 < res.s_star < st, (mu, n, objective)
                val = objective.value_of(res.metrics)
                vd = objective.value_of(res.dutch)
                ve = objective.value_of(res.english)
                if objective.minimize:
                    assert val < min(vd, ve) - 1e-6
                else:
                    assert val > max(vd, ve) + 1e-6

            def eu_a(s):
                return auction_metrics(
                    cfg, solve_profile(cfg, s, s_tilde=st)).eu_auctioneer

            d0 = (eu_a(1e-3 + ds) - eu_a(1e-3 - ds)) / (2 * ds)
            assert d0 > 0.0
            for s in (st + 0.02, (st + 1.0) / 2.0, 0.98):
                dneg = (eu_a(s + ds) - eu_a(s - ds)) / (2 * ds)
                assert dneg < 0.0, (mu, n, s)
            print(f"[PASS] criterion-6 mu={mu} n={n}: four optima interior "
                  f"and beat both benchmarks; revenue slope +{d0:.3f} at 0+, "
                  f"negative beyond the waiting threshold")


def test_criterion_7_monte_carlo_oracle():
    # Window: 3 standard errors plus one tick.  The clock discretization
    # shifts each per-auction quantity by strictly less than one tick, and
    # the simulator reports the tick precisely so the tolerance can absorb
    # that bias; at (n=10, s=1) the winner surplus concentrates so sharply
    # that its standard error drops below the tick bias, making a bare-3-SE
    # window unattainable by any correct discretized-clock run.
    t0 = time.perf_counter()
    draws, tick, seed = 1_000_000, 1e-4, 20240809
    for n in (2, 10):
        for mu in (0.1, 0.7):
            cfg = MarketConfig(n=n, cost=TimeCostSpec(CostKind.LINEAR, mu))
            st = threshold_s_tilde(cfg)
            s_star = optimize_starting_price(cfg, Objective.AUCTIONEER).s_star
            for s in (0.0, s_star, 1.0):
                prof = solve_profile(cfg, s, s_tilde=st)
                quad = auction_metrics(cfg, prof)
                mc = monte_carlo(cfg, prof, draws, seed=seed, tick=tick,
                                 threads=4)
                zs = {}
                ok = True
                for field in ("eu_auctioneer", "eu_bidder", "eu_social",
                              "expected_duration"):
                    se = max(getattr(mc.stderr, field), 1e-12)
                    diff = getattr(mc.bundle, field) - getattr(quad, field)
                    zs[field] = diff / se
                    ok = ok and abs(diff) <= 3.0 * se + tick
                eff_ok = mc.inefficiency <= 10.0 * tick
                print(f"[{'PASS' if ok and eff_ok else 'FAIL'}] criterion-7 "
                      f"n={n} mu={mu} s={s:.4f}: z="
                      + ",".join(f"{k.split('_')[-1]}={v:+.2f}"
                                 for k, v in zs.items())
                      + f" ineff={mc.inefficiency:.1e} (<= {10 * tick:.0e})")
                assert ok, (n, mu, s, zs)
                assert eff_ok
                assert mc.no_winner == 0
    elapsed = time.perf_counter() - t0
    print(f"criterion-7 runtime: {elapsed:.1f}s (limit 300s)")
    assert elapsed <= 300.0


def test_criterion_8_best_response_gaps():
    cfg = MarketConfig(n=2, cost=TimeCostSpec(CostKind.LINEAR, 0.5))
    st = threshold_s_tilde(cfg)
    quantiles = (np.arange(20) + 0.5) / 20.0
    for s in (0.2, 0.462, 0.7):
        prof = solve_profile(cfg, s, s_tilde=st)
        gaps = [best_response_gap(cfg, s, float(v), 400, profile=prof)
                for v in quantiles]
        worst = max(gaps)
        print(f"[{'PASS' if worst <= 5e-4 else 'FAIL'}] criterion-8 s={s}: "
              f"max deviation gain {worst:.2e} (<=5e-4)")
        assert worst <= 5e-4


# -- consistency companions for the known-red published cells --------------

def test_consistency_example_bidder_welfare_oracle():
    # frozen adaptive-quadrature oracle values (tests/oracles.py)
    res = optimize_starting_price(
        MarketConfig(n=2, cost=TimeCostSpec(CostKind.LINEAR, 0.5)),
        Objective.AUCTIONEER)
    rd = res.ratios_vs_dutch()
    assert rd["eu_b"] == pytest.approx(0.14821984113651038 / 0.09657359027997264,
                                       rel=1e-3)
    assert rd["eu_s"] == pytest.approx(0.6346048038539499 / 0.42055845832016403,
                                       rel=1e-3)


# frozen from the closed-form + adaptive-quadrature oracle pipeline
CONSISTENCY_CELLS = {
    # (n, mu): (eu_a %, eu_b %, eu_s %, ed %)
    (2, 0.1): (105.7496, 106.0630, 105.9042, 18.8751),
    (2, 0.7): (207.7374, 222.6687, 214.2047, 17.2136),
    (10, 0.1): (101.3754, 101.6602, 101.4037, 28.8485),
    (10, 0.7): (130.1094, 140.4389, 131.0289, 16.6430),
}


def test_consistency_reference_table_oracle():
    base = MarketConfig(n=2, cost=TimeCostSpec(CostKind.LINEAR, 0.1))
    from flowerauction import comparative_sweep

    rows = comparative_sweep(base, mu_grid=[0.1, 0.7], n_grid=[2, 10],
                             objectives=[Objective.AUCTIONEER], threads=4)
    for r in rows:
        ea, eb, es, ed = CONSISTENCY_CELLS[(r.n, r.mu)]
        assert r.eu_a_ratio * 100 == pytest.approx(ea, abs=0.02)
        assert r.eu_b_ratio * 100 == pytest.approx(eb, abs=0.05)
        assert r.eu_s_ratio * 100 == pytest.approx(es, abs=0.03)
        assert r.ed_ratio * 100 == pytest.approx(ed, abs=0.02)
