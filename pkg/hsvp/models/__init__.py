"""Pydantic models for budgets, run configuration and solver outputs.

Models:
    Budgets: the pair (r, k) bounding representation complexity and set size
    RunConfig: one CLI invocation
    GenConfig: synthetic hierarchy and probability rows
    Cover: disjoint hierarchy nodes representing a class set
    Prediction: a solver's answer for one instance
    MetricsRow: aggregated recall, size, time and n for a solver and budget

Usage:
    from hsvp.models import Budgets, Prediction

    budgets = Budgets(r=2, k=3)
"""

from hsvp.models.inputs import SOLVER_NAMES, Budgets, GenConfig, RunConfig
from hsvp.models.outputs import Cover, MetricsRow, Prediction

__all__ = [
    "SOLVER_NAMES",
    "Budgets",
    "Cover",
    "GenConfig",
    "MetricsRow",
    "Prediction",
    "RunConfig",
]
