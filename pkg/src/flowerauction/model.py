"""Market primitives: time-cost functions, value distributions, order statistics.

Everything downstream consumes three ingredients defined here:

* a discount factor c(t) on the winner's item value, with c(0) = 1,
  -1 < c'(t) <= 0 and c''(t) >= 0 on the unit time interval;
* an i.i.d. private-value distribution F on [0, 1] with density f, f(0) > 0;
* the order-statistic helpers built from F: the CDF/density of the highest
  of n-1 rival values and the joint density of the top two of n values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ValidationError

COST_GRID_POINTS = 1001  # sampling resolution used by validate_cost


class CostKind(str, Enum):
    NONE = "none"
    LINEAR = "linear"
    EXPONENTIAL = "exponential"
    HYPERBOLIC = "hyperbolic"


# integer codes shared with the compiled kernels
COST_CODE = {
    CostKind.NONE: 0,
    CostKind.LINEAR: 1,
    CostKind.EXPONENTIAL: 2,
    CostKind.HYPERBOLIC: 3,
}

DIST_UNIFORM = 0
DIST_CUSTOM = -1


@dataclass(frozen=True)
class TimeCostSpec:
    """Parametric discount factor c(t) with analytic first and second derivatives.

    ``mu`` is the impatience parameter; mu in [0, 1) keeps c' > -1 for every
    shipped kind.  Out-of-range mu is representable (so validate_cost can
    report it) but rejected on evaluation.
    """

    kind: CostKind
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", CostKind(self.kind))
        mu = float(self.mu)
        if not np.isfinite(mu):
            raise ValidationError("time-cost mu must be finite")
        object.__setattr__(self, "mu", mu)

    # -- serialization ------------------------------------------------
    def spec_string(self) -> str:
        if self.kind is CostKind.NONE:
            return "none"
        return f"{self.kind.value}:{self.mu:g}"

    @classmethod
    def parse(cls, text: str) -> "TimeCostSpec":
        """Parse the ``<kind>:<mu>`` wire form, e.g. ``linear:0.5`` or ``none``."""
        text = text.strip().lower()
        if text == "none":
            return cls(CostKind.NONE, 0.0)
        if ":" not in text:
            raise ValidationError(
                f"bad cost spec {text!r}: expected '<kind>:<mu>' or 'none'")
        kind_s, mu_s = text.split(":", 1)
        try:
            kind = CostKind(kind_s)
        except ValueError:
            raise ValidationError(f"unknown cost kind {kind_s!r}") from None
        if kind is CostKind.NONE:
            raise ValidationError("cost kind 'none' takes no parameter")
        try:
            mu = float(mu_s)
        except ValueError:
            raise ValidationError(f"bad cost parameter {mu_s!r}") from None
        return cls(kind, mu)

    # -- evaluation ---------------------------------------------------
    def _check_mu(self):
        if not 0.0 <= self.mu < 1.0:
            raise ValidationError(
                f"time-cost mu={self.mu:g} outside [0, 1); impatience must "
                "keep the discount slope above -1")

    def _value_raw(self, t):
        mu = self.mu
        if self.kind is CostKind.LINEAR:
            return 1.0 - mu * t
        if self.kind is CostKind.EXPONENTIAL:
            return np.exp(-mu * t)
        if self.kind is CostKind.HYPERBOLIC:
            return 1.0 / (1.0 + mu * t)
        return np.ones_like(np.asarray(t, dtype=float))[()] if np.ndim(t) else 1.0

    def _slope_raw(self, t):
        mu = self.mu
        if self.kind is CostKind.LINEAR:
            return -mu + 0.0 * np.asarray(t, dtype=float)[()]
        if self.kind is CostKind.EXPONENTIAL:
            return -mu * np.exp(-mu * t)
        if self.kind is CostKind.HYPERBOLIC:
            return -mu / (1.0 + mu * t) ** 2
        return 0.0 * np.asarray(t, dtype=float)[()]

    def _curvature_raw(self, t):
        mu = self.mu
        if self.kind is CostKind.EXPONENTIAL:
            return mu * mu * np.exp(-mu * t)
        if self.kind is CostKind.HYPERBOLIC:
            return 2.0 * mu * mu / (1.0 + mu * t) ** 3
        return 0.0 * np.asarray(t, dtype=float)[()]

    @property
    def has_time_cost(self) -> bool:
        """False when c(t) is identically 1 (kind none, or mu == 0)."""
        return self.kind is not CostKind.NONE and self.mu > 0.0


def _check_duration(t) -> None:
    t = np.asarray(t)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValidationError("duration t must lie in [0, 1]")


def cost_eval(spec: TimeCostSpec, t):
    """Discount factor c(t) for t in [0, 1]; accepts scalars or arrays."""
    spec._check_mu()
    _check_duration(t)
    return spec._value_raw(t)


def cost_slope(spec: TimeCostSpec, t):
    """Analytic c'(t); lies in (-1, 0] for validated specs."""
    spec._check_mu()
    _check_duration(t)
    return spec._slope_raw(t)


def cost_curvature(spec: TimeCostSpec, t):
    """Analytic c''(t); nonnegative for every shipped kind."""
    spec._check_mu()
    _check_duration(t)
    return spec._curvature_raw(t)


@dataclass(frozen=True)
class CostViolation:
    condition: str
    t: float | None = None
    value: float | None = None

    def describe(self) -> str:
        if self.t is None:
            return self.condition
        return f"{self.condition} at t={self.t:.6f} (value {self.value:.6g})"


@dataclass(frozen=True)
class CostValidation:
    passed: bool
    violations: tuple[CostViolation, ...] = ()

    def describe(self) -> str:
        if self.passed:
            return "ok"
        return "; ".join(v.describe() for v in self.violations)


def validate_cost(spec: TimeCostSpec) -> CostValidation:
    """Sample c, c', c'' on a dense grid and check every model requirement.

    Returns a structured report rather than raising, so callers can surface
    the first violating t.  Checks: mu range, c(0) = 1, c strictly
    decreasing when mu > 0 (constant allowed otherwise), c' in (-1, 0],
    and convexity c'' >= 0.
    """
    bad: list[CostViolation] = []
    if not 0.0 <= spec.mu < 1.0:
        bad.append(CostViolation("mu outside [0, 1)", None, None))
        return CostValidation(False, tuple(bad))

    t = np.linspace(0.0, 1.0, COST_GRID_POINTS)
    c = np.asarray(spec._value_raw(t), dtype=float)
    cp = np.asarray(spec._slope_raw(t), dtype=float)
    cpp = np.asarray(spec._curvature_raw(t), dtype=float)

    if abs(c[0] - 1.0) > 1e-12:
        bad.append(CostViolation("c(0) != 1", 0.0, float(c[0])))
    slope_hi = cp.max()
    if spec.has_time_cost:
        if slope_hi >= 0.0:
            i = int(cp.argmax())
            bad.append(CostViolation("c not strictly decreasing", float(t[i]), float(cp[i])))
    elif np.any(cp != 0.0):
        i = int(np.abs(cp).argmax())
        bad.append(CostViolation("c not constant despite no time cost", float(t[i]), float(cp[i])))
    if cp.min() <= -1.0:
        i = int(cp.argmin())
        bad.append(CostViolation("c' <= -1", float(t[i]), float(cp[i])))
    if cp.max() > 0.0:
        i = int(cp.argmax())
        bad.append(CostViolation("c' > 0", float(t[i]), float(cp[i])))
    if cpp.min() < 0.0:
        i = int(cpp.argmin())
        bad.append(CostViolation("c'' < 0", float(t[i]), float(cpp[i])))
    return CostValidation(not bad, tuple(bad))


@dataclass(frozen=True)
class ValueDistribution:
    """Private-value distribution on [0, 1].

    The shipped distribution is uniform; custom continuous distributions can
    be supplied through the callables (cdf, pdf, ppf), subject to f(0) > 0
    which the bid-curve start-up expansion relies on.  ``kernel_code`` marks
    distributions the compiled kernels understand; anything else runs on the
    pure-Python solver path.
    """

    kind: str
    cdf: Callable = field(repr=False, compare=False)
    pdf: Callable = field(repr=False, compare=False)
    ppf: Callable = field(repr=False, compare=False)
    kernel_code: int = DIST_CUSTOM

    @classmethod
    def uniform(cls) -> "ValueDistribution":
        ident = lambda x: np.asarray(x, dtype=float) + 0.0
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        return cls(kind="uniform", cdf=ident, pdf=one, ppf=ident,
                   kernel_code=DIST_UNIFORM)

    @classmethod
    def parse(cls, text: str) -> "ValueDistribution":
        if text.strip().lower() == "uniform":
            return cls.uniform()
        raise ValidationError(f"unknown value distribution {text!r}")


@dataclass(frozen=True)
class NumericalSettings:
    """Solver knobs; all strictly positive."""

    ode_steps: int = 2000         # bid-curve integration grid
    root_tol: float = 1e-6        # cutoff / waiting-threshold roots
    exit_tol: float = 1e-12       # English exit residual
    quad_nodes: int = 2001        # Simpson nodes per outer integral segment
    opt_tol: float = 1e-4         # golden-section window on the starting price
    opt_scan_points: int = 201    # coarse scan preceding golden section

    def __post_init__(self):
        if self.ode_steps < 8:
            raise ValidationError("ode_steps must be at least 8")
        if self.quad_nodes < 5:
            raise ValidationError("quad_nodes must be at least 5")
        if self.opt_scan_points < 3:
            raise ValidationError("opt_scan_points must be at least 3")
        for name in ("root_tol", "exit_tol", "opt_tol"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MarketConfig:
    """A fully specified market: bidder count, values, time cost, numerics."""

    n: int
    dist: ValueDistribution = field(default_factory=ValueDistribution.uniform)
    cost: TimeCostSpec = TimeCostSpec(CostKind.NONE)
    num: NumericalSettings = NumericalSettings()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError("bidder count n must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        report = validate_cost(self.cost)
        if not report.passed:
            raise ValidationError(f"invalid time cost: {report.describe()}")
        if not float(self.dist.pdf(0.0)) > 0.0:
            raise ValidationError("value density must satisfy f(0) > 0")


def _check_unit(x, name: str) -> None:
    arr = np.asarray(x)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValidationError(f"{name} must lie in [0, 1]")


def highest_rival_cdf(cfg: MarketConfig, v):
    """CDF of the best of n-1 rival values: F(v)**(n-1)."""
    _check_unit(v, "v")
    return np.asarray(cfg.dist.cdf(v), dtype=float) ** (cfg.n - 1)


def highest_rival_pdf(cfg: MarketConfig, v):
    """Density of the best of n-1 rival values: (n-1) F**(n-2) f."""
    _check_unit(v, "v")
    F = np.asarray(cfg.dist.cdf(v), dtype=float)
    f = np.asarray(cfg.dist.pdf(v), dtype=float)
    return (cfg.n - 1) * F ** (cfg.n - 2) * f


def top_two_joint_pdf(cfg: MarketConfig, v, x):
    """Joint density of (highest, second highest) of n values at (v, x), x <= v."""
    _check_unit(v, "v")
    _check_unit(x, "x")
    if np.any(np.asarray(x) > np.asarray(v)):
        raise ValidationError("second-highest value x may not exceed the highest v")
    n = cfg.n
    F = np.asarray(cfg.dist.cdf(x), dtype=float)
    return n * (n - 1) * np.asarray(cfg.dist.pdf(v), dtype=float) \
        * np.asarray(cfg.dist.pdf(x), dtype=float) * F ** (n - 2)
