import numpy as np
import pytest

from flowerauction import (CostKind, MarketConfig, TimeCostSpec,
                           auction_metrics, dutch_benchmark, english_benchmark,
                           myerson_baseline, solve_profile, threshold_s_tilde)

# frozen adaptive-quadrature oracle values (tests/oracles.py), n=2, linear 0.5
EX = {
    0.462: dict(eu_a=0.33816511698781776, eu_b=0.1482137890539041,
                eu_s=0.634592695095626, ed=0.13795945359313178),
    1.0: dict(eu_a=0.22741127776021877, eu_b=0.09657359027997264,
              eu_s=0.42055845832016403, ed=0.7725887222397811),
    0.0: dict(eu_a=0.2688374054040548, eu_b=0.14918597297347944,
              eu_s=0.5672093513510137, ed=0.2688374054040548),
}


@pytest.mark.parametrize("s", sorted(EX))
def test_metrics_match_adaptive_quadrature_oracle(example_cfg, example_s_tilde, s):
    bundle = auction_metrics(example_cfg, solve_profile(example_cfg, s,
                                                        s_tilde=example_s_tilde))
    assert bundle.eu_auctioneer == pytest.approx(EX[s]["eu_a"], abs=2e-5)
    assert bundle.eu_bidder == pytest.approx(EX[s]["eu_b"], abs=2e-5)
    assert bundle.eu_social == pytest.approx(EX[s]["eu_s"], abs=4e-5)
    assert bundle.expected_duration == pytest.approx(EX[s]["ed"], abs=2e-5)


def test_published_example_values(example_cfg, example_s_tilde):
    at = lambda s: auction_metrics(example_cfg,
                                   solve_profile(example_cfg, s,
                                                 s_tilde=example_s_tilde))
    assert at(0.462).eu_auctioneer == pytest.approx(0.338, abs=0.003)
    assert at(1.0).eu_auctioneer == pytest.approx(0.227, abs=0.003)
    assert at(0.0).eu_auctioneer == pytest.approx(0.269, abs=0.003)
    assert at(0.462).expected_duration == pytest.approx(0.138, abs=0.003)


@pytest.mark.parametrize("n,expect", [(2, 1.0 / 3.0), (3, 0.5), (10, 9.0 / 11.0)])
def test_myerson_baseline_uniform(n, expect):
    assert myerson_baseline(MarketConfig(n=n)) == pytest.approx(expect, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 10])
def test_payoff_equivalence_without_time_cost(n):
    cfg = MarketConfig(n=n)
    base = myerson_baseline(cfg)
    expect = (n - 1) / (n + 1)
    assert base == pytest.approx(expect, abs=1e-9)
    vals = [auction_metrics(cfg, solve_profile(cfg, s, s_tilde=1.0)).eu_auctioneer
            for s in np.linspace(0.0, 1.0, 11)]
    assert max(vals) - min(vals) <= 1e-3
    assert all(abs(v - expect) <= 1e-3 for v in vals)


def test_additivity_over_grid():
    for mu in np.linspace(0.0, 0.81, 10):
        cfg = MarketConfig(n=3, cost=TimeCostSpec(CostKind.LINEAR, mu))
        st = threshold_s_tilde(cfg)
        for s in np.linspace(0.0, 1.0, 10):
            b = auction_metrics(cfg, solve_profile(cfg, s, s_tilde=st))
            assert abs(b.eu_social - (b.eu_auctioneer + cfg.n * b.eu_bidder)) <= 1e-6


def test_boundary_consistency_bit_for_bit(example_cfg, example_s_tilde):
    d = dutch_benchmark(example_cfg, s_tilde=example_s_tilde)
    e = english_benchmark(example_cfg, s_tilde=example_s_tilde)
    d2 = auction_metrics(example_cfg, solve_profile(example_cfg, 1.0,
                                                    s_tilde=example_s_tilde))
    e2 = auction_metrics(example_cfg, solve_profile(example_cfg, 0.0,
                                                    s_tilde=example_s_tilde))
    assert d == d2
    assert e == e2


def test_english_duration_equals_revenue_at_zero_start():
    # at s = 0 the price and the duration are both the winning exit price
    cfg = MarketConfig(n=2)
    e = english_benchmark(cfg)
    assert e.expected_duration == e.eu_auctioneer
    assert e.expected_duration == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_english_benchmark_second_price_equivalence():
    # no time cost: ascending auction revenue = E[second-highest value]
    for n in (2, 5):
        cfg = MarketConfig(n=n)
        expect = (n - 1) / (n + 1)
        assert english_benchmark(cfg).eu_auctioneer == pytest.approx(expect, abs=1e-6)


def test_metric_signs_and_bounds():
    rng = np.random.default_rng(3)
    for _ in range(6):
        n = int(rng.integers(2, 8))
        mu = float(rng.uniform(0.05, 0.85))
        kinds = [CostKind.LINEAR, CostKind.EXPONENTIAL, CostKind.HYPERBOLIC]
        kind = kinds[int(rng.integers(0, 3))]
        cfg = MarketConfig(n=n, cost=TimeCostSpec(kind, mu))
        st = threshold_s_tilde(cfg)
        for s in rng.uniform(0.0, 1.0, 3):
            b = auction_metrics(cfg, solve_profile(cfg, float(s), s_tilde=st))
            assert b.eu_auctioneer >= 0.0
            assert b.eu_bidder >= -1e-9
            assert b.eu_social >= 0.0
            assert 0.0 <= b.expected_duration <= 1.0


def test_revenue_slope_signs(example_cfg, example_s_tilde):
    # revenue rises off the ascending-only corner and falls on the
    # everyone-waits interval
    at = lambda s: auction_metrics(example_cfg,
                                   solve_profile(example_cfg, s,
                                                 s_tilde=example_s_tilde)).eu_auctioneer
    ds = 1e-4
    assert (at(1e-3 + ds) - at(1e-3 - ds)) / (2 * ds) > 0.0
    for s in (example_s_tilde + 0.02, 0.7, 0.9, 1.0 - 0.02):
        assert (at(s + ds) - at(s - ds)) / (2 * ds) < 0.0


def test_quadrature_and_grid_convergence():
    # halving either discretization moves nothing at tolerance scale
    from flowerauction import NumericalSettings

    coarse = MarketConfig(n=3, cost=TimeCostSpec(CostKind.LINEAR, 0.5),
                          num=NumericalSettings(ode_steps=1000, quad_nodes=501))
    fine = MarketConfig(n=3, cost=TimeCostSpec(CostKind.LINEAR, 0.5))
    for s in (0.3, 0.55):
        a = auction_metrics(coarse, solve_profile(coarse, s))
        b = auction_metrics(fine, solve_profile(fine, s))
        assert abs(a.eu_auctioneer - b.eu_auctioneer) < 1e-8
        assert abs(a.eu_bidder - b.eu_bidder) < 1e-8
        assert abs(a.expected_duration - b.expected_duration) < 1e-8


def test_metrics_json_and_csv(example_cfg, example_profile):
    bundle = auction_metrics(example_cfg, example_profile)
    d = bundle.to_json_dict()
    assert set(d) == {"s", "eu_auctioneer", "eu_bidder", "eu_social",
                      "expected_duration"}
    row = bundle.csv_row()
    parts = row.split(",")
    assert len(parts) == 5
    assert float(parts[1]) == bundle.eu_auctioneer
