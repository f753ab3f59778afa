"""Solver x (r, k) benchmark grid with CSV and aligned-text reports."""

import csv
import io
import logging
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from hsvp.cli.runner import BatchRunner
from hsvp.config.models import SolverConfig
from hsvp.core.errors import TooLargeException
from hsvp.core.hierarchy import Hierarchy
from hsvp.core.prob import ProblemInstance
from hsvp.eval.metrics import evaluate
from hsvp.eval.timing import measure
from hsvp.models import Budgets, MetricsRow
from hsvp.solvers.registry import solver_registry

logger = logging.getLogger(__name__)

SKIPPED_GUARD = "skipped (guard)"

CSV_COLUMNS = ["solver", "r", "k", "recall", "avg_set_size", "avg_time_us", "avg_n", "status"]
TABLE_COLUMNS = ["solver", "r", "k", "R", "|Y|", "t_us", "n"]


class BenchCell(BaseModel):
    """One solver at one budget pair: metrics, or the reason it was skipped."""

    solver: str
    r: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    metrics: Optional[MetricsRow] = None
    status: str = "ok"


def run_bench(
    h: Hierarchy,
    instances: Sequence[ProblemInstance],
    solvers: Sequence[str],
    budgets: Sequence[Budgets],
    warmup: int = 1,
    workers: int = 1,
    timing: bool = True,
    config: Optional[SolverConfig] = None,
) -> List[BenchCell]:
    """Run every solver at every budget pair over the instances.

    Args:
        h: Hierarchy
        instances: Instances to solve
        solvers: Registered solver names
        budgets: Budget pairs, in report order
        warmup: Solves of the first instance before each cell, excluded from
            the reported times
        workers: Worker threads per cell
        timing: When False, times are reported as 0
        config: Solver limits

    Returns:
        Cells ordered by solver, then budgets
    """
    truths = [inst.y_true for inst in instances]
    cells: List[BenchCell] = []
    for name in solvers:
        runner = BatchRunner(solver_registry.create(name, h, config), workers)
        for b in budgets:
            try:
                warm_us = runner.warm_up(instances[0], b, warmup)
                predictions, wall_us = measure(lambda: runner.run(instances, b))
            except TooLargeException as e:
                logger.warning(f"{name} at {b}: {e}")
                cells.append(BenchCell(solver=name, r=b.r, k=b.k, status=SKIPPED_GUARD))
                continue
            metrics = evaluate(predictions, truths)
            if not timing:
                metrics = metrics.model_copy(update={"avg_time_us": 0.0})
            cells.append(BenchCell(solver=name, r=b.r, k=b.k, metrics=metrics))
            logger.info(
                f"{name} at {b}: recall={metrics.recall} "
                f"avg_time_us={metrics.avg_time_us:.1f} avg_n={metrics.avg_n:.1f} "
                f"warmup_us={warm_us:.1f} wall_us={wall_us:.1f}"
            )
    return cells


def _fmt(value: Optional[float], spec: str) -> str:
    return "-" if value is None else format(value, spec)


def render_csv(cells: Sequence[BenchCell]) -> str:
    """Cells as CSV; skipped cells leave the metric columns empty."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cell in cells:
        m = cell.metrics
        if m is None:
            writer.writerow([cell.solver, cell.r, cell.k, "", "", "", "", cell.status])
            continue
        writer.writerow(
            [
                cell.solver,
                cell.r,
                cell.k,
                "" if m.recall is None else repr(m.recall),
                repr(m.avg_set_size),
                repr(m.avg_time_us),
                repr(m.avg_n),
                cell.status,
            ]
        )
    return buffer.getvalue()


def render_table(cells: Sequence[BenchCell]) -> str:
    """Cells as a left-aligned text table."""
    rows = [TABLE_COLUMNS]
    for cell in cells:
        m = cell.metrics
        if m is None:
            rows.append([cell.solver, str(cell.r), str(cell.k), cell.status, "", "", ""])
            continue
        rows.append(
            [
                cell.solver,
                str(cell.r),
                str(cell.k),
                _fmt(m.recall, ".4f"),
                _fmt(m.avg_set_size, ".2f"),
                _fmt(m.avg_time_us, ".1f"),
                _fmt(m.avg_n, ".1f"),
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(value.ljust(width) for value, width in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"
