"""Interval reachability for high-dimensional nonlinear ODEs.

Growth-bound, mixed-monotonicity and Monte Carlo reach tubes on top of a
fixed-step RK4 engine that splits every stage across state components.
"""
from .intervals import IntervalError, IntervalVector, PointSet, center, contains, hull
from .methods import (GROWTH_BOUND, METHODS, MIXED_MONOTONICITY, MONTE_CARLO, MonteCarloSpec,
                      ReachError, ReachTube, RunReport, coverage_estimate, growth_bound,
                      mixed_monotonicity, monte_carlo, run_method, sample_count)
from .rk4 import IntegrationError, IntegrationJob, RK4Engine, integrate
from .system import ModelError, ReachProblem, SystemModel, embed

__version__ = "0.1.0"

__all__ = [
    "IntervalError", "IntervalVector", "PointSet", "center", "contains", "hull",
    "GROWTH_BOUND", "METHODS", "MIXED_MONOTONICITY", "MONTE_CARLO", "MonteCarloSpec",
    "ReachError", "ReachTube", "RunReport", "coverage_estimate", "growth_bound",
    "mixed_monotonicity", "monte_carlo", "run_method", "sample_count",
    "IntegrationError", "IntegrationJob", "RK4Engine", "integrate",
    "ModelError", "ReachProblem", "SystemModel", "embed",
]
