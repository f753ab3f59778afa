"""Prometheus metrics for solver runs."""

import logging
from pathlib import Path

from prometheus_client import (
    REGISTRY,
    Counter,
    Histogram,
    Info,
    write_to_textfile,
)

from hsvp import __version__

logger = logging.getLogger(__name__)

# Metrics
SOLVE_COUNT = Counter(
    "hsvp_solves_total",
    "Total number of solved instances",
    ["solver"],
)

SOLVE_DURATION = Histogram(
    "hsvp_solve_duration_seconds",
    "Solve duration in seconds",
    ["solver"],
    buckets=(1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0),
)

SEARCH_SIZE = Histogram(
    "hsvp_solver_complexity",
    "Solver-specific complexity counter n per instance",
    ["solver"],
    buckets=(1, 10, 100, 1_000, 10_000, 100_000, 1_000_000),
)

GUARD_TRIPS = Counter(
    "hsvp_guard_trips_total",
    "Total number of computations refused by a size guard",
    ["solver"],
)

SERVICE_INFO = Info("hsvp_build_info", "Build information")

_enabled = True


def setup_metrics(enabled: bool = True) -> None:
    """Enable or disable metric recording."""
    global _enabled
    _enabled = enabled
    if enabled:
        SERVICE_INFO.info({"version": __version__, "service": "hsvp"})
    logger.debug(f"Prometheus metrics {'enabled' if enabled else 'disabled'}")


def record_solve(solver: str, duration_us: float, n: int) -> None:
    """Record one solved instance.

    Args:
        solver: Solver name
        duration_us: Solve time in microseconds
        n: Solver complexity counter
    """
    if not _enabled:
        return
    SOLVE_COUNT.labels(solver=solver).inc()
    SOLVE_DURATION.labels(solver=solver).observe(duration_us / 1e6)
    SEARCH_SIZE.labels(solver=solver).observe(n)


def record_guard_trip(solver: str) -> None:
    """Record a computation refused by a size guard."""
    if _enabled:
        GUARD_TRIPS.labels(solver=solver).inc()


def write_metrics(path: Path) -> None:
    """Write the registry in Prometheus text format."""
    write_to_textfile(str(path), REGISTRY)
    logger.info(f"Wrote metrics to {path}")
