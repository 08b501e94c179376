"""Symmetric-equilibrium objects for a given starting price s.

For starting price s the bidders split at a value cutoff p(s): values below
p wait for the descending phase and claim at the bid curve b(v, s), values
at or above p bid at the opening and later leave the ascending phase at the
exit price m(v, s).  The bid curve solves

    db/dv = (g/G) * (c(s - b) v - b) / (1 + c'(s - b) v),   b(0) = 0,

the exit price solves c(m - s) v - m = 0, the cutoff is pinned by
b(p, s) = s while the curve still reaches s, and above the waiting
threshold (the s solving b(1, s) = s) everyone waits and the auction is a
pure descending clock.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _kernels as kernels
from ._kernels import DIST_CUSTOM
from .errors import SolverError, ValidationError
from .model import COST_CODE, CostKind, MarketConfig


def _cost_args(cfg: MarketConfig):
    return COST_CODE[cfg.cost.kind], cfg.cost.mu


def _dist_kwargs(cfg: MarketConfig):
    if cfg.dist.kernel_code == DIST_CUSTOM:
        return {"cdf": cfg.dist.cdf, "pdf": cfg.dist.pdf}
    return {}


@dataclass(frozen=True)
class DutchBidCurve:
    """Tabulated descending-phase bid curve on strictly increasing value nodes.

    Interpolation between nodes is monotone piecewise cubic, so interpolated
    bids stay within the node range [0, s].
    """

    s: float
    grid: np.ndarray = field(repr=False)
    bids: np.ndarray = field(repr=False)
    crossed: bool = False
    bracket: tuple[float, float, float] | None = None  # (v_lo, b_lo, v_hi)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        bids = np.asarray(self.bids, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "bids", bids)
        object.__setattr__(self, "_interp", None)
        object.__setattr__(self, "_inverse", None)

    @property
    def v_max(self) -> float:
        return float(self.grid[-1])

    def _interpolator(self):
        if self._interp is None:
            object.__setattr__(self, "_interp", PchipInterpolator(self.grid, self.bids))
        return self._interp

    def price(self, v):
        """Bid b(v, s) for v inside the tabulated domain [0, v_max]."""
        arr = np.asarray(v, dtype=float)
        if np.any(arr < -1e-12) or np.any(arr > self.grid[-1] + 1e-12):
            raise ValidationError(
                f"value outside bid-curve domain [0, {self.grid[-1]:.6g}]")
        if self.grid.shape[0] < 2:
            out = np.zeros_like(arr)
            return float(out) if np.ndim(v) == 0 else out
        arr = np.clip(arr, self.grid[0], self.grid[-1])
        out = self._interpolator()(arr)
        return float(out) if np.ndim(v) == 0 else out

    def value_at_price(self, price):
        """Inverse map: the value whose bid equals ``price``.

        Prices above the top tabulated bid clamp to the top value (claiming
        above everyone's bid wins against every waiter), prices below 0 are
        rejected.
        """
        arr = np.asarray(price, dtype=float)
        if np.any(arr < -1e-12):
            raise ValidationError("bid prices are nonnegative")
        if self.grid.shape[0] < 2:
            out = np.zeros_like(arr)
            return float(out) if np.ndim(price) == 0 else out
        if self._inverse is None:
            b, idx = np.unique(self.bids, return_index=True)
            object.__setattr__(self, "_inverse", PchipInterpolator(b, self.grid[idx]))
        out = self._inverse(np.clip(arr, self.bids[0], self.bids[-1]))
        return float(out) if np.ndim(price) == 0 else out


def solve_dutch_curve(cfg: MarketConfig, s: float, v_max: float = 1.0) -> DutchBidCurve:
    """Integrate the bid curve on [0, v_max], stopping where b would exceed s.

    Classical fourth-order steps on a uniform grid; the singular start-up at
    v = 0 is handled by the series b ~ a v with a = (n-1) c(s)/n, and early
    steps are subdivided for stability (see the kernel backends).
    """
    if not 0.0 < s <= 1.0:
        raise ValidationError("starting price s must lie in (0, 1]")
    if not 0.0 < v_max <= 1.0:
        raise ValidationError("v_max must lie in (0, 1]")
    ck, mu = _cost_args(cfg)
    try:
        v, b, crossed, v_lo, b_lo, v_hi = kernels.dutch_curve(
            cfg.n, cfg.dist.kernel_code, ck, mu, s, v_max, cfg.num.ode_steps,
            **_dist_kwargs(cfg))
    except RuntimeError as exc:
        raise SolverError(str(exc)) from exc
    bracket = (v_lo, b_lo, v_hi) if crossed else None
    return DutchBidCurve(s=s, grid=v, bids=b, crossed=crossed, bracket=bracket)


def _series_cutoff(cfg: MarketConfig, s: float) -> float:
    # crossing inside the first grid cell: invert the start-up series
    ck, mu = _cost_args(cfg)
    a1 = (cfg.n - 1) * kernels.cost_value(ck, mu, s) / cfg.n
    return s / a1


def _cutoff_from_curve(cfg: MarketConfig, s: float, curve: DutchBidCurve) -> float:
    if not curve.crossed:
        return 1.0
    v_lo, b_lo, v_hi = curve.bracket
    if v_hi == v_lo:
        return v_lo
    if v_lo == 0.0:
        return min(_series_cutoff(cfg, s), v_hi)
    ck, mu = _cost_args(cfg)
    kw = _dist_kwargs(cfg)
    lo, hi = v_lo, v_hi
    for _ in range(200):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        b_mid = kernels.rk4_step(v_lo, b_lo, mid - v_lo, cfg.n,
                                 cfg.dist.kernel_code, ck, mu, s, **kw)
        if b_mid > s:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cutoff(cfg: MarketConfig, s: float) -> float:
    """Value cutoff p(s) splitting opening bidders from waiters.

    s = 0 gives p = 0 (everyone bids: ascending auction); if the bid curve
    never reaches s the cutoff is 1 (everyone waits: descending auction);
    otherwise p solves b(p, s) = s inside the crossing bracket.
    """
    if not 0.0 <= s <= 1.0:
        raise ValidationError("starting price s must lie in [0, 1]")
    if s == 0.0:
        return 0.0
    curve = solve_dutch_curve(cfg, s, 1.0)
    return _cutoff_from_curve(cfg, s, curve)


def threshold_s_tilde(cfg: MarketConfig) -> float:
    """Smallest starting price at which every bidder waits (p(s) = 1).

    Found by bisecting on whether the bid curve crosses s before v = 1; the
    crossing point b(1, s) = s is unique because b moves less than one-for-
    one with s.  Without a time cost the threshold is degenerate and 1.0 is
    returned by convention (profiles carry the degeneracy flag).
    """
    if not cfg.cost.has_time_cost:
        return 1.0
    tol = cfg.num.root_tol
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if solve_dutch_curve(cfg, mid, 1.0).crossed:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def english_exit_numeric(cfg: MarketConfig, v: float, s: float) -> float:
    """Exit price via the generic root solver (bisection + Newton polish)."""
    ck, mu = _cost_args(cfg)
    out = kernels.english_exit_batch(np.asarray([float(v)]), float(s), ck, mu)
    return float(out[0])


def exit_prices(cfg: MarketConfig, v, s: float):
    """Vectorized ascending-phase exit prices m(v, s).

    Closed forms where they exist (m = v without time cost, the rational
    form for the linear kind), root solver otherwise.
    """
    arr = np.asarray(v, dtype=float)
    mu = cfg.cost.mu
    if not cfg.cost.has_time_cost:
        out = arr + 0.0
    elif cfg.cost.kind is CostKind.LINEAR:
        out = (1.0 + mu * s) * arr / (1.0 + mu * arr)
    else:
        ck, _ = _cost_args(cfg)
        out = kernels.english_exit_batch(arr, float(s), ck, mu)
    return float(out) if np.ndim(v) == 0 else out


def english_exit(cfg: MarketConfig, v: float, s: float) -> float:
    """Exit price m(v, s): the unique root of c(m - s) v - m = 0.

    The residual of the returned value is checked against the configured
    exit tolerance (this also pins the closed forms to the defining
    equation).
    """
    if not 0.0 <= v <= 1.0:
        raise ValidationError("value v must lie in [0, 1]")
    if not 0.0 <= s <= 1.0:
        raise ValidationError("starting price s must lie in [0, 1]")
    m = exit_prices(cfg, float(v), s)
    ck, mu = _cost_args(cfg)
    resid = kernels.cost_value(ck, mu, m - s) * v - m
    if abs(resid) > max(cfg.num.exit_tol, 64.0 * np.finfo(float).eps):
        raise SolverError(f"exit-price residual {resid:.3e} above tolerance")
    return m


@dataclass(frozen=True)
class EquilibriumProfile:
    """Everything the equilibrium pins down at one starting price."""

    cfg: MarketConfig = field(repr=False, compare=False)
    s: float
    cutoff: float
    s_tilde: float
    s_tilde_degenerate: bool
    dutch_curve: DutchBidCurve = field(repr=False)

    def exit_price(self, v):
        """Ascending-phase exit m(v, s) for the profile's starting price."""
        return exit_prices(self.cfg, v, self.s)

    def bid_price(self, v):
        """Descending-phase bid b(v, s) on [0, cutoff]."""
        return self.dutch_curve.price(v)

    # -- serialization -------------------------------------------------
    def to_json_dict(self) -> dict:
        fmt = lambda x: float(f"{x:.17g}")
        return {
            "s": fmt(self.s),
            "p": fmt(self.cutoff),
            "s_tilde": fmt(self.s_tilde),
            "s_tilde_degenerate": self.s_tilde_degenerate,
            "grid": [fmt(x) for x in self.dutch_curve.grid],
            "bids": [fmt(x) for x in self.dutch_curve.bids],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, payload: dict, cfg: MarketConfig) -> "EquilibriumProfile":
        curve = DutchBidCurve(
            s=float(payload["s"]),
            grid=np.asarray(payload["grid"], dtype=float),
            bids=np.asarray(payload["bids"], dtype=float))
        return cls(cfg=cfg, s=float(payload["s"]), cutoff=float(payload["p"]),
                   s_tilde=float(payload["s_tilde"]),
                   s_tilde_degenerate=bool(payload["s_tilde_degenerate"]),
                   dutch_curve=curve)

    def curve_csv_rows(self):
        for v, b in zip(self.dutch_curve.grid, self.dutch_curve.bids):
            yield float(v), float(b)


def _truncate_at_cutoff(curve: DutchBidCurve, p: float, s: float) -> DutchBidCurve:
    keep = curve.grid < p - 1e-15
    grid = np.append(curve.grid[keep], p)
    bids = np.append(curve.bids[keep], s)
    return DutchBidCurve(s=s, grid=grid, bids=bids, crossed=True,
                         bracket=curve.bracket)


def solve_profile(cfg: MarketConfig, s: float, s_tilde: float | None = None) -> EquilibriumProfile:
    """Bundle cutoff, waiting threshold, bid curve and exit evaluator at s.

    Deterministic and pure; pass a precomputed ``s_tilde`` to amortize the
    threshold search across many starting prices of the same market.
    """
    if not 0.0 <= s <= 1.0:
        raise ValidationError("starting price s must lie in [0, 1]")
    if s_tilde is None:
        s_tilde = threshold_s_tilde(cfg)
    degenerate = not cfg.cost.has_time_cost
    if s == 0.0:
        # pure ascending auction: everyone bids, the descending branch is empty
        curve = DutchBidCurve(s=0.0, grid=np.array([0.0]), bids=np.array([0.0]))
        return EquilibriumProfile(cfg=cfg, s=0.0, cutoff=0.0, s_tilde=s_tilde,
                                  s_tilde_degenerate=degenerate, dutch_curve=curve)
    raw = solve_dutch_curve(cfg, s, 1.0)
    if not raw.crossed:
        # bid cap never binds (s = 1 or s above the waiting threshold)
        return EquilibriumProfile(cfg=cfg, s=s, cutoff=1.0, s_tilde=s_tilde,
                                  s_tilde_degenerate=degenerate, dutch_curve=raw)
    p = _cutoff_from_curve(cfg, s, raw)
    curve = _truncate_at_cutoff(raw, p, s)
    return EquilibriumProfile(cfg=cfg, s=s, cutoff=p, s_tilde=s_tilde,
                              s_tilde_degenerate=degenerate, dutch_curve=curve)
