"""Monte Carlo oracle: play the clock protocol and estimate every metric.

Agents follow the solved equilibrium on a discretized clock (default tick
1e-4); the empirical price, winner surplus, welfare and duration estimates
are independent of the quadrature pipeline and serve as its cross-check.
Randomness is counter-based (Philox keyed by the seed, one block of n+1
uniforms per draw), so results are bit-identical for a given seed no matter
how the draws are batched or threaded.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as kernels
from ._quadrature import cumulative_simpson, odd_node_count
from .equilibrium import EquilibriumProfile, exit_prices, solve_profile
from .errors import ValidationError
from .metrics import MetricsBundle
from .model import MarketConfig, cost_eval

_BATCH = 1 << 16
_MAX_CSV_BIDDERS = 20


class Phase(str, Enum):
    DUTCH = "dutch"
    ENGLISH_SOLO = "english_solo"
    ENGLISH_CONTESTED = "english_contested"


_PHASE_BY_CODE = {0: Phase.DUTCH, 1: Phase.ENGLISH_SOLO, 2: Phase.ENGLISH_CONTESTED}


@dataclass(frozen=True)
class SimulationRecord:
    values: tuple[float, ...]
    initial_bidders: tuple[int, ...]
    phase: Phase
    winner: int
    price: float
    duration: float


def _validate_sim_inputs(cfg: MarketConfig, values, tick: float) -> np.ndarray:
    if tick <= 0.0:
        raise ValidationError("tick must be strictly positive")
    vals = np.asarray(values, dtype=float)
    if vals.shape != (cfg.n,):
        raise ValidationError(f"expected {cfg.n} values, got shape {vals.shape}")
    if np.any(vals < 0.0) or np.any(vals > 1.0):
        raise ValidationError("values must lie in [0, 1]")
    return vals


def run_auction(cfg: MarketConfig, profile: EquilibriumProfile, values,
                tick: float, rng: np.random.Generator | None = None) -> SimulationRecord:
    """Play one auction on the discretized clock.

    Opening move (instant, costless): bid iff v >= cutoff.  ``rng`` is only
    consumed when a tie within one tick needs breaking.
    """
    vals = _validate_sim_inputs(cfg, values, tick)
    if rng is None:
        rng = np.random.default_rng()
    s, p = profile.s, profile.cutoff
    initial = tuple(int(i) for i in np.flatnonzero(vals >= p))

    def pick(tied):
        if len(tied) == 1:
            return int(tied[0])
        r = min(int(rng.random() * len(tied)), len(tied) - 1)
        return int(tied[r])

    if not initial:
        k = np.maximum(np.ceil((s - profile.bid_price(vals)) / tick), 1.0)
        kmin = k.min()
        price = max(s - kmin * tick, 0.0)
        winner = pick(np.flatnonzero(k == kmin))
        return SimulationRecord(tuple(vals), initial, Phase.DUTCH, winner,
                                price, s - price)
    if len(initial) == 1:
        return SimulationRecord(tuple(vals), initial, Phase.ENGLISH_SOLO,
                                initial[0], s, 0.0)
    e = np.full(cfg.n, -1.0)
    idx = np.asarray(initial)
    e[idx] = np.maximum(np.floor((profile.exit_price(vals[idx]) - s) / tick) + 1.0, 1.0)
    e1 = e.max()
    e2 = np.partition(e, cfg.n - 2)[cfg.n - 2]
    winner = pick(np.flatnonzero(e == e1))
    price = s + e2 * tick
    return SimulationRecord(tuple(vals), initial, Phase.ENGLISH_CONTESTED,
                            winner, price, e2 * tick)


@dataclass(frozen=True)
class MetricsStderr:
    eu_auctioneer: float
    eu_bidder: float
    eu_social: float
    expected_duration: float

    def to_json_dict(self) -> dict:
        return {
            "eu_auctioneer": self.eu_auctioneer,
            "eu_bidder": self.eu_bidder,
            "eu_social": self.eu_social,
            "expected_duration": self.expected_duration,
        }


@dataclass(frozen=True)
class MonteCarloResult:
    bundle: MetricsBundle
    stderr: MetricsStderr
    draws: int
    seed: int
    tick: float
    inefficiency: float     # fraction of auctions won by a non-top-value bidder
    no_winner: int          # descending clock hit the floor unclaimed (must be 0)
    phase_counts: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "metrics": self.bundle.to_json_dict(),
            "stderr": self.stderr.to_json_dict(),
            "draws": self.draws,
            "seed": self.seed,
            "tick": self.tick,
            "inefficiency": self.inefficiency,
            "no_winner": self.no_winner,
            "phase_counts": dict(self.phase_counts),
        }


def _draw_uniforms(seed: int, start: int, count: int, per: int) -> np.ndarray:
    # One 4-word-aligned Philox block span per draw: advance() moves the
    # counter in 128-bit blocks (4 doubles), so aligning each draw's span
    # makes any batch partition regenerate the identical stream.
    per4 = (per + 3) & ~3
    bg = np.random.Philox(key=seed)
    if start > 0:
        bg.advance(start * per4 // 4)
    u = np.random.Generator(bg).random((count, per4))
    return u[:, :per]


def _play_batch(cfg: MarketConfig, profile: EquilibriumProfile, seed: int,
                lo: int, size: int, tick: float):
    n = cfg.n
    u = _draw_uniforms(seed, lo, size, n + 1)
    vals = np.asarray(cfg.dist.ppf(u[:, :n]), dtype=float)
    tie = np.ascontiguousarray(u[:, n])
    p, s = profile.cutoff, profile.s
    if p > 0.0 and profile.dutch_curve.grid.shape[0] > 1:
        bids = np.asarray(profile.dutch_curve.price(np.minimum(vals, p)), dtype=float)
    else:
        bids = np.zeros_like(vals)
    exits = np.asarray(exit_prices(cfg, vals, s), dtype=float)
    phase, winner, price, duration, nw = kernels.play_auctions(
        vals, bids, exits, p, s, tick, tie)
    return vals, phase, winner, price, duration, nw


def monte_carlo(cfg: MarketConfig, profile: EquilibriumProfile, draws: int,
                seed: int, tick: float = 1e-4, threads: int = 1,
                record_file=None) -> MonteCarloResult:
    """Estimate the four metrics from ``draws`` simulated auctions.

    Returns means with standard errors, the fraction of auctions where the
    winner is not the highest-value bidder (bounded by tie-within-a-tick
    events), the phase tally, and the count of unclaimed descending clocks
    (always 0: any bidder claims at the price floor).  ``record_file``
    streams one CSV row per auction and forces sequential batches so the
    rows come out in draw order.
    """
    if draws < 1:
        raise ValidationError("draws must be at least 1")
    if tick <= 0.0:
        raise ValidationError("tick must be strictly positive")
    seed = int(seed) & ((1 << 64) - 1)
    n = cfg.n
    if record_file is not None and n > _MAX_CSV_BIDDERS:
        raise ValidationError(
            f"record streaming supports at most {_MAX_CSV_BIDDERS} bidders")

    spans = [(lo, min(_BATCH, draws - lo)) for lo in range(0, draws, _BATCH)]

    def work(span):
        lo, size = span
        vals, phase, winner, price, duration, nw = _play_batch(
            cfg, profile, seed, lo, size, tick)
        cdur = np.asarray(cost_eval(cfg.cost, np.minimum(duration, 1.0)), dtype=float)
        safe_w = np.maximum(winner, 0)
        vw = vals[np.arange(size), safe_w]
        social = np.where(winner >= 0, cdur * vw, 0.0)
        surplus = np.where(winner >= 0, social - price, 0.0) / n
        ineff = int((winner != vals.argmax(axis=1)).sum())
        stats = np.array([price, surplus, social, duration])
        part = {
            "sum": stats.sum(axis=1),
            "sumsq": (stats * stats).sum(axis=1),
            "ineff": ineff,
            "no_winner": nw,
            "phases": np.bincount(phase, minlength=3),
        }
        if record_file is not None:
            _write_records(record_file, lo, vals, phase, winner, price, duration)
        return part

    if threads > 1 and record_file is None:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, spans))  # reduced in span order
    else:
        parts = [work(sp) for sp in spans]

    total = np.zeros(4)
    totalsq = np.zeros(4)
    ineff = 0
    no_winner = 0
    phases = np.zeros(3, dtype=np.int64)
    for part in parts:
        total += part["sum"]
        totalsq += part["sumsq"]
        ineff += part["ineff"]
        no_winner += part["no_winner"]
        phases += part["phases"]

    mean = total / draws
    if draws > 1:
        var = np.maximum(totalsq - draws * mean * mean, 0.0) / (draws - 1)
    else:
        var = np.zeros(4)
    se = np.sqrt(var / draws)
    bundle = MetricsBundle(s=profile.s, eu_auctioneer=float(mean[0]),
                           eu_bidder=float(mean[1]), eu_social=float(mean[2]),
                           expected_duration=float(mean[3]))
    stderr = MetricsStderr(eu_auctioneer=float(se[0]), eu_bidder=float(se[1]),
                           eu_social=float(se[2]), expected_duration=float(se[3]))
    return MonteCarloResult(bundle=bundle, stderr=stderr, draws=draws, seed=seed,
                            tick=tick, inefficiency=ineff / draws,
                            no_winner=int(no_winner),
                            phase_counts={
                                Phase.DUTCH.value: int(phases[0]),
                                Phase.ENGLISH_SOLO.value: int(phases[1]),
                                Phase.ENGLISH_CONTESTED.value: int(phases[2]),
                            })


RECORD_CSV_HEADER = "draw_id,phase,winner,price,duration," + \
    ",".join(f"v{i+1}" for i in range(_MAX_CSV_BIDDERS))


def _write_records(fh, lo, vals, phase, winner, price, duration):
    n = vals.shape[1]
    pad = "," * (_MAX_CSV_BIDDERS - n)
    for i in range(vals.shape[0]):
        vtxt = ",".join(repr(float(x)) for x in vals[i])
        fh.write(f"{lo + i},{_PHASE_BY_CODE[int(phase[i])].value},{int(winner[i])},"
                 f"{float(price[i])!r},{float(duration[i])!r},{vtxt}{pad}\n")


def best_response_gap(cfg: MarketConfig, s: float, v: float,
                      deviation_grid_size: int = 400,
                      profile: EquilibriumProfile | None = None) -> float:
    """Maximal utility gain from a unilateral deviation at value v.

    Rivals play the solved equilibrium.  Deviations swept: every descending-
    phase claim price z in [0, s], every ascending-phase exit keyed by the
    rival-value threshold u in [cutoff, 1], and the opening flip implied by
    evaluating both families for every v.  Positive return = profitable
    deviation found (a correct equilibrium keeps this at quadrature noise).
    """
    if not 0.0 <= v <= 1.0:
        raise ValidationError("value v must lie in [0, 1]")
    if profile is None:
        profile = solve_profile(cfg, s)
    n = cfg.n
    p = profile.cutoff
    dist = cfg.dist
    G = lambda x: np.asarray(dist.cdf(x), dtype=float) ** (n - 1)
    Gp = float(G(p))

    # ascending-phase tables: Jc(u) = int_p^u c(m-s) dG, Jm(u) = int_p^u m dG
    if 1.0 - p > 1e-12:
        nodes = odd_node_count(cfg.num.quad_nodes)
        x = np.linspace(p, 1.0, nodes)
        dx = (1.0 - p) / (nodes - 1)
        m = exit_prices(cfg, x, s)
        cm = np.asarray(cost_eval(cfg.cost, np.maximum(m - s, 0.0)), dtype=float)
        w = (n - 1) * np.asarray(dist.pdf(x), dtype=float) \
            * np.asarray(dist.cdf(x), dtype=float) ** (n - 2)
        Jc = cumulative_simpson(cm * w, dx)
        Jm = cumulative_simpson(m * w, dx)

        def eu_bid(vv, u):
            return Gp * (vv - s) + vv * np.interp(u, x, Jc) - np.interp(u, x, Jm)
    else:
        def eu_bid(vv, u):
            return Gp * (vv - s) + np.zeros_like(np.asarray(u, dtype=float))

    def eu_wait(vv, z):
        vinv = profile.dutch_curve.value_at_price(z)
        t = np.maximum(s - z, 0.0)
        return G(vinv) * (np.asarray(cost_eval(cfg.cost, t)) * vv - z)

    z_grid = np.linspace(0.0, s, deviation_grid_size + 1)
    u_grid = np.linspace(p, 1.0, deviation_grid_size + 1)
    best_dev = max(float(np.max(eu_wait(v, z_grid))),
                   float(np.max(eu_bid(v, u_grid))))

    if v >= p:
        eu_eq = float(eu_bid(v, np.asarray(v)))
    else:
        b = profile.dutch_curve.price(v)
        eu_eq = float(G(v) * (cost_eval(cfg.cost, max(s - b, 0.0)) * v - b))
    return best_dev - eu_eq
