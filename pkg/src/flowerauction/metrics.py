"""Expected auction characteristics by quadrature.

Four numbers summarize an equilibrium profile at starting price s: the
auctioneer's expected revenue, the ex-ante per-bidder utility, the social
welfare (their sum, n bidders counted) and the expected duration.  Each is a
one-dimensional integral over the winner's value after the inner
second-highest-value integrals are folded into running (cumulative Simpson)
tables on a shared grid, split exactly at the cutoff p where the integrands
kink.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._quadrature import cumulative_simpson, odd_node_count, simpson_integrate
from .equilibrium import EquilibriumProfile, exit_prices, solve_profile
from .errors import ValidationError
from .model import MarketConfig, cost_eval

_SEGMENT_EPS = 1e-14  # skip a segment when its width is numerically zero


@dataclass(frozen=True)
class MetricsBundle:
    """The four auction characteristics evaluated at one starting price."""

    s: float
    eu_auctioneer: float
    eu_bidder: float     # ex ante, per bidder
    eu_social: float
    expected_duration: float

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "eu_auctioneer": self.eu_auctioneer,
            "eu_bidder": self.eu_bidder,
            "eu_social": self.eu_social,
            "expected_duration": self.expected_duration,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def csv_row(self) -> str:
        return ",".join(repr(x) for x in (self.s, self.eu_auctioneer,
                                          self.eu_bidder, self.eu_social,
                                          self.expected_duration))

    CSV_HEADER = "s,eu_a,eu_b,eu_s,ed"


def auction_metrics(cfg: MarketConfig, profile: EquilibriumProfile) -> MetricsBundle:
    """Evaluate revenue, bidder utility, welfare and duration for a profile.

    Descending branch (winner's value below the cutoff p): the winner pays
    her bid after the clock ran from s down to it.  Ascending branch: a lone
    opener pays s instantly; otherwise the winner pays the second-highest
    exit price m(x, s) after the clock ran up to it.  The constant-s inner
    integral uses the closed form int_0^p f F^(n-2) dx = F^(n-1)(p)/(n-1).
    """
    n = cfg.n
    s = profile.s
    p = profile.cutoff
    dist = cfg.dist
    nodes = odd_node_count(cfg.num.quad_nodes)

    eu_a = eu_b = eu_s = ed = 0.0

    if p > _SEGMENT_EPS:
        v = np.linspace(0.0, p, nodes)
        dx = p / (nodes - 1)
        b = profile.dutch_curve.price(v)
        F = np.asarray(dist.cdf(v), dtype=float)
        f = np.asarray(dist.pdf(v), dtype=float)
        c = np.asarray(cost_eval(cfg.cost, np.maximum(s - b, 0.0)), dtype=float)
        gf = F ** (n - 1) * f
        eu_a += simpson_integrate(b * n * gf, dx)
        eu_b += simpson_integrate((c * v - b) * gf, dx)
        eu_s += simpson_integrate(c * v * n * gf, dx)
        ed += simpson_integrate((s - b) * n * gf, dx)

    if 1.0 - p > _SEGMENT_EPS:
        x = np.linspace(p, 1.0, nodes)
        dx = (1.0 - p) / (nodes - 1)
        m = exit_prices(cfg, x, s)
        cm = np.asarray(cost_eval(cfg.cost, np.maximum(m - s, 0.0)), dtype=float)
        F = np.asarray(dist.cdf(x), dtype=float)
        f = np.asarray(dist.pdf(x), dtype=float)
        Fp = float(dist.cdf(p)) ** (n - 1)
        w = f * F ** (n - 2)
        A = cumulative_simpson(m * w, dx)             # int_p^v m f F^(n-2)
        C = cumulative_simpson(cm * w, dx)            # int_p^v c(m-s) f F^(n-2)
        D = cumulative_simpson((m - s) * w, dx)       # int_p^v (m-s) f F^(n-2)
        eu_a += simpson_integrate(f * (n * s * Fp + n * (n - 1) * A), dx)
        eu_b += simpson_integrate(f * ((x - s) * Fp + (n - 1) * (x * C - A)), dx)
        eu_s += simpson_integrate(f * (n * x * Fp + n * (n - 1) * x * C), dx)
        ed += simpson_integrate(f * n * (n - 1) * D, dx)

    return MetricsBundle(s=s, eu_auctioneer=eu_a, eu_bidder=eu_b,
                         eu_social=eu_s, expected_duration=ed)


def dutch_benchmark(cfg: MarketConfig, s_tilde: float | None = None) -> MetricsBundle:
    """Pure descending clock from 1 (starting price s = 1); same code path."""
    return auction_metrics(cfg, solve_profile(cfg, 1.0, s_tilde=s_tilde))


def english_benchmark(cfg: MarketConfig, s_tilde: float | None = None) -> MetricsBundle:
    """Pure ascending clock from 0 (starting price s = 0); same code path."""
    return auction_metrics(cfg, solve_profile(cfg, 0.0, s_tilde=s_tilde))


def myerson_baseline(cfg: MarketConfig) -> float:
    """Virtual-value revenue integral: int [v - (1-F)/f] dF^n.

    With no time cost the auctioneer's expected utility equals this for
    every starting price (payoff equivalence).
    """
    nodes = odd_node_count(cfg.num.quad_nodes)
    v = np.linspace(0.0, 1.0, nodes)
    dx = 1.0 / (nodes - 1)
    F = np.asarray(cfg.dist.cdf(v), dtype=float)
    f = np.asarray(cfg.dist.pdf(v), dtype=float)
    if f.min() <= 0.0:
        raise ValidationError(
            "virtual-value integral needs a strictly positive density on [0, 1]")
    virtual = v - (1.0 - F) / f
    return simpson_integrate(virtual * cfg.n * F ** (cfg.n - 1) * f, dx)
