"""Numerical laboratory for the Istanbul Flower Auction.

A hybrid clock auction for perishable goods: bidders who accept the opening
price compete in an ascending (English) phase; if nobody accepts, the clock
descends (Dutch).  Item values decay with auction duration through a
discount factor c(t).  The package solves the symmetric equilibrium for any
starting price, evaluates revenue / bidder utility / welfare / duration by
quadrature, optimizes the starting price, and cross-checks everything
against a discretized-clock Monte Carlo simulator.
"""
from ._kernels import available_backends, backend_name, set_backend
from .equilibrium import (
    DutchBidCurve,
    EquilibriumProfile,
    cutoff,
    english_exit,
    english_exit_numeric,
    exit_prices,
    solve_dutch_curve,
    solve_profile,
    threshold_s_tilde,
)
from .errors import SolverError, ValidationError
from .metrics import (
    MetricsBundle,
    auction_metrics,
    dutch_benchmark,
    english_benchmark,
    myerson_baseline,
)
from .model import (
    CostKind,
    CostValidation,
    MarketConfig,
    NumericalSettings,
    TimeCostSpec,
    ValueDistribution,
    cost_curvature,
    cost_eval,
    cost_slope,
    highest_rival_cdf,
    highest_rival_pdf,
    top_two_joint_pdf,
    validate_cost,
)
from .optimize import (
    Objective,
    OptimizationResult,
    SweepRow,
    comparative_sweep,
    default_mu_grid,
    default_n_grid,
    optimize_many,
    optimize_starting_price,
)
from .simulate import (
    MetricsStderr,
    MonteCarloResult,
    Phase,
    SimulationRecord,
    best_response_gap,
    monte_carlo,
    run_auction,
)

__version__ = "0.1.0"

__all__ = [
    "CostKind", "CostValidation", "DutchBidCurve", "EquilibriumProfile",
    "MarketConfig", "MetricsBundle", "MetricsStderr", "MonteCarloResult",
    "NumericalSettings", "Objective", "OptimizationResult", "Phase",
    "SimulationRecord", "SolverError", "SweepRow", "TimeCostSpec",
    "ValidationError", "ValueDistribution", "auction_metrics",
    "available_backends", "backend_name", "best_response_gap",
    "comparative_sweep", "cost_curvature", "cost_eval", "cost_slope",
    "cutoff", "default_mu_grid", "default_n_grid", "dutch_benchmark",
    "english_benchmark", "english_exit", "english_exit_numeric",
    "exit_prices", "highest_rival_cdf", "highest_rival_pdf",
    "monte_carlo", "myerson_baseline", "optimize_many", "optimize_starting_price",
    "run_auction", "set_backend", "solve_dutch_curve", "solve_profile",
    "threshold_s_tilde", "top_two_joint_pdf", "validate_cost",
    "__version__",
]
