"""Exhaustive reference solver exposed through the solver interface."""

from hsvp.core.errors import TooLargeException
from hsvp.core.prob import ProblemInstance
from hsvp.eval.oracle import oracle_solve
from hsvp.models import Budgets, Prediction
from hsvp.solvers.base import BaseSolver


class OracleSolver(BaseSolver):
    """Scores every class subset; limited to small K."""

    name = "oracle"

    def prepare(self, budgets: Budgets) -> None:
        limit = self.config.oracle_max_classes
        if self.hierarchy.class_count > limit:
            raise TooLargeException(
                "class count K for the exhaustive oracle",
                limit,
                self.hierarchy.class_count,
            )

    def _solve_impl(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        return oracle_solve(
            self.hierarchy,
            instance.as_flat(self.hierarchy),
            budgets,
            max_classes=self.config.oracle_max_classes,
        )
