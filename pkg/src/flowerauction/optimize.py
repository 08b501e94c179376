"""Starting-price optimization and comparative sweeps.

A coarse scan over a uniform grid of starting prices brackets the optimum,
then golden-section search refines it.  Derivative-free on purpose: the
objective's s-derivative would need the bid curve's response to s, which is
only available by finite differences here, and stacking those tolerances
buys nothing over bracketing.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .equilibrium import solve_profile, threshold_s_tilde
from .errors import ValidationError
from .metrics import MetricsBundle, auction_metrics
from .model import CostKind, MarketConfig, TimeCostSpec

_FLAT_SPAN = 1e-6       # objective span below this flags a plateau
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Objective(str, Enum):
    AUCTIONEER = "auctioneer"
    BIDDER = "bidder"
    WELFARE = "welfare"
    DURATION = "duration"   # minimized; the others are maximized

    @property
    def minimize(self) -> bool:
        return self is Objective.DURATION

    def value_of(self, m: MetricsBundle) -> float:
        if self is Objective.AUCTIONEER:
            return m.eu_auctioneer
        if self is Objective.BIDDER:
            return m.eu_bidder
        if self is Objective.WELFARE:
            return m.eu_social
        return m.expected_duration


@dataclass(frozen=True)
class OptimizationResult:
    objective: Objective
    s_star: float
    metrics: MetricsBundle
    dutch: MetricsBundle
    english: MetricsBundle
    cutoff_at_star: float
    s_tilde: float
    flags: tuple[str, ...] = ()

    def ratios_vs_dutch(self) -> dict:
        return _ratios(self.metrics, self.dutch)

    def ratios_vs_english(self) -> dict:
        return _ratios(self.metrics, self.english)

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective.value,
            "s_star": self.s_star,
            "cutoff_at_star": self.cutoff_at_star,
            "s_tilde": self.s_tilde,
            "metrics": self.metrics.to_json_dict(),
            "dutch": self.dutch.to_json_dict(),
            "english": self.english.to_json_dict(),
            "ratios_vs_dutch": self.ratios_vs_dutch(),
            "ratios_vs_english": self.ratios_vs_english(),
            "flags": list(self.flags),
        }


def _ratios(num: MetricsBundle, den: MetricsBundle) -> dict:
    safe = lambda a, b: a / b if b != 0.0 else math.inf
    return {
        "eu_a": safe(num.eu_auctioneer, den.eu_auctioneer),
        "eu_b": safe(num.eu_bidder, den.eu_bidder),
        "eu_s": safe(num.eu_social, den.eu_social),
        "ed": safe(num.expected_duration, den.expected_duration),
    }


def _golden_section(f, lo: float, hi: float, tol: float):
    """Minimize f on [lo, hi]; returns (x, f(x)) at the final midpoint."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def optimize_many(cfg: MarketConfig, objectives) -> dict[Objective, OptimizationResult]:
    """Optimize several objectives at once, sharing the coarse scan.

    The scan evaluates the full metrics bundle per grid point, which serves
    every objective; only the golden-section refinements differ.
    """
    objectives = [Objective(o) for o in objectives]
    s_tilde = threshold_s_tilde(cfg)
    cache: dict[float, MetricsBundle] = {}

    def bundle_at(s: float) -> MetricsBundle:
        b = cache.get(s)
        if b is None:
            b = auction_metrics(cfg, solve_profile(cfg, s, s_tilde=s_tilde))
            cache[s] = b
        return b

    grid = np.linspace(0.0, 1.0, cfg.num.opt_scan_points)
    bundles = [bundle_at(float(s)) for s in grid]
    dutch = bundle_at(1.0)
    english = bundle_at(0.0)
    degenerate = not cfg.cost.has_time_cost

    results: dict[Objective, OptimizationResult] = {}
    for objective in objectives:
        sign = 1.0 if objective.minimize else -1.0
        vals = np.array([objective.value_of(b) for b in bundles])
        flags: list[str] = []
        span = float(vals.max() - vals.min())
        best = int(np.argmin(sign * vals))  # first minimum: ties pick smallest s

        if span <= _FLAT_SPAN * max(1.0, float(np.abs(vals).max())):
            # plateau (no time cost): every grid point ties within noise
            flags.append("flat-objective")
            s_star = float(grid[0])
        else:
            lo = float(grid[max(best - 1, 0)])
            hi = float(grid[min(best + 1, len(grid) - 1)])
            s_star, _ = _golden_section(
                lambda s: sign * objective.value_of(bundle_at(s)),
                lo, hi, cfg.num.opt_tol)

        profile = solve_profile(cfg, s_star, s_tilde=s_tilde)
        if degenerate:
            flags.append("degenerate-threshold")
        results[objective] = OptimizationResult(
            objective=objective, s_star=s_star, metrics=bundle_at(s_star),
            dutch=dutch, english=english, cutoff_at_star=profile.cutoff,
            s_tilde=s_tilde, flags=tuple(flags))
    return results


def optimize_starting_price(cfg: MarketConfig, objective: Objective | str) -> OptimizationResult:
    """Find the starting price optimizing one objective.

    Coarse scan on a uniform grid over [0, 1], then golden-section on the
    bracket around the best grid point down to the configured window.
    Scan ties resolve to the smallest s; a plateau objective (no time cost)
    is flagged rather than failed.
    """
    objective = Objective(objective)
    return optimize_many(cfg, [objective])[objective]


@dataclass(frozen=True)
class SweepRow:
    mu: float
    n: int
    objective: Objective
    s_star: float = math.nan
    p_star: float = math.nan
    s_tilde: float = math.nan
    eu_a_ratio: float = math.nan
    eu_b_ratio: float = math.nan
    eu_s_ratio: float = math.nan
    ed_ratio: float = math.nan
    flags: tuple[str, ...] = ()
    error: str | None = None

    CSV_HEADER = ("mu,n,objective,s_star,p_star,s_tilde,"
                  "eu_a_ratio,eu_b_ratio,eu_s_ratio,ed_ratio,flags")

    def csv_row(self) -> str:
        flags = ";".join(self.flags) if not self.error else f"error:{self.error}"
        nums = ",".join(repr(x) for x in (self.s_star, self.p_star, self.s_tilde,
                                          self.eu_a_ratio, self.eu_b_ratio,
                                          self.eu_s_ratio, self.ed_ratio))
        return f"{self.mu!r},{self.n},{self.objective.value},{nums},{flags}"


def default_mu_grid() -> list[float]:
    return [round(0.05 * i, 2) for i in range(17)]  # 0.0 .. 0.8


def default_n_grid() -> list[int]:
    return list(range(2, 21))


def _sweep_cell(base_cfg: MarketConfig, mu: float, n: int,
                objectives: list[Objective]) -> list[SweepRow]:
    try:
        kind = base_cfg.cost.kind if base_cfg.cost.kind is not CostKind.NONE \
            else CostKind.LINEAR
        cfg = replace(base_cfg, n=n, cost=TimeCostSpec(kind, mu))
        results = optimize_many(cfg, objectives)
    except Exception as exc:  # per-row capture: a bad cell must not kill the sweep
        return [SweepRow(mu=mu, n=n, objective=ob, error=str(exc))
                for ob in objectives]
    rows = []
    for ob in objectives:
        res = results[ob]
        ratios = res.ratios_vs_dutch()
        rows.append(SweepRow(mu=mu, n=n, objective=ob, s_star=res.s_star,
                             p_star=res.cutoff_at_star, s_tilde=res.s_tilde,
                             eu_a_ratio=ratios["eu_a"], eu_b_ratio=ratios["eu_b"],
                             eu_s_ratio=ratios["eu_s"], ed_ratio=ratios["ed"],
                             flags=res.flags))
    return rows


def comparative_sweep(base_cfg: MarketConfig,
                      mu_grid=None, n_grid=None,
                      objectives=(Objective.AUCTIONEER,),
                      threads: int = 1) -> list[SweepRow]:
    """Optimize every (mu, n, objective) cell and report benchmark ratios.

    Rows come back mu-major, then n, then objective, independent of the
    thread count; cells are pure and evaluated independently.
    """
    mu_grid = default_mu_grid() if mu_grid is None else list(mu_grid)
    n_grid = default_n_grid() if n_grid is None else list(n_grid)
    objectives = [Objective(o) for o in objectives]
    if not mu_grid or not n_grid or not objectives:
        raise ValidationError("sweep grids must be nonempty")
    for mu in mu_grid:
        if not 0.0 <= mu < 1.0:
            raise ValidationError(f"sweep mu={mu:g} outside [0, 1)")
    cells = [(mu, n) for mu in mu_grid for n in n_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            groups = list(pool.map(
                lambda c: _sweep_cell(base_cfg, c[0], c[1], objectives), cells))
    else:
        groups = [_sweep_cell(base_cfg, mu, n, objectives) for mu, n in cells]
    return [row for group in groups for row in group]
