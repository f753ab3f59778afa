"""Batch runner solving independent instances, optionally on worker threads."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

from hsvp.core.prob import ProblemInstance
from hsvp.eval.timing import measure
from hsvp.models import Budgets, Prediction
from hsvp.solvers.base import BaseSolver

logger = logging.getLogger(__name__)


class BatchRunner:
    """Solves a batch with one solver; results come back in input order."""

    def __init__(self, solver: BaseSolver, workers: int = 1):
        """Initialize runner.

        Args:
            solver: Solver shared by all workers
            workers: Number of worker threads (1 solves inline)
        """
        self.solver = solver
        self.workers = max(1, workers)

    def run(self, instances: Sequence[ProblemInstance], budgets: Budgets) -> List[Prediction]:
        """Solve every instance under the budgets.

        Raises:
            TooLargeException: If the solver refuses the budgets
        """
        self.solver.prepare(budgets)
        if self.workers == 1 or len(instances) < 2:
            return [self.solver.solve(inst, budgets) for inst in instances]

        logger.debug(
            f"Solving {len(instances)} instances with {self.solver.name} "
            f"on {self.workers} workers"
        )
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(lambda inst: self.solver.solve(inst, budgets), instances))

    def warm_up(self, instance: ProblemInstance, budgets: Budgets, rounds: int) -> float:
        """Solves that populate caches before measuring.

        Returns:
            Duration of the last round in microseconds, 0.0 when rounds < 1
        """
        self.solver.prepare(budgets)
        if rounds < 1:
            return 0.0
        _, elapsed_us = measure(lambda: self.solver.solve(instance, budgets), warmup=rounds - 1)
        return elapsed_us
