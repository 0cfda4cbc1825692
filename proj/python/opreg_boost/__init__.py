"""Operator-regression boosting for online optimization."""

from ._core import (
    NonConvergence,
    bench_lasso,
    bench_phase,
    cvxreg_fit,
    interpolate,
    opreg_fit,
    project_pair,
    prox_linear_step,
)

__all__ = [
    "NonConvergence",
    "bench_lasso",
    "bench_phase",
    "cvxreg_fit",
    "interpolate",
    "opreg_fit",
    "project_pair",
    "prox_linear_step",
]
