"""Base solver abstract class."""

from abc import ABC, abstractmethod
from typing import ClassVar, Optional

from hsvp.config.models import SolverConfig
from hsvp.core.errors import TooLargeException
from hsvp.core.hierarchy import Hierarchy
from hsvp.core.prob import ProblemInstance
from hsvp.models import Budgets, Prediction
from hsvp.observability.metrics import record_guard_trip, record_solve
from hsvp.observability.tracing import get_tracer

tracer = get_tracer(__name__)


class BaseSolver(ABC):
    """Abstract base class for set-valued prediction solvers.

    A solver is bound to one hierarchy and may cache budget-dependent
    structures across instances; concrete solvers guard their caches so a
    solver can be shared by worker threads.
    """

    name: ClassVar[str] = ""

    def __init__(self, hierarchy: Hierarchy, config: Optional[SolverConfig] = None):
        """Initialize solver.

        Args:
            hierarchy: Hierarchy every instance is solved on
            config: Solver limits (defaults to the loaded configuration)
        """
        if config is None:
            from hsvp.config.settings import get_solver_config

            config = get_solver_config()
        self.hierarchy = hierarchy
        self.config = config

    def prepare(self, budgets: Budgets) -> None:
        """Build budget-dependent structures ahead of the first solve.

        Raises:
            TooLargeException: If the solver cannot handle these budgets
        """

    def solve(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        """Solve one instance with tracing and metrics.

        Args:
            instance: Instance to solve
            budgets: Budgets

        Returns:
            Prediction

        Raises:
            TooLargeException: If a size guard refuses the computation
        """
        with tracer.start_as_current_span("hsvp.solve") as span:
            span.set_attribute("solver", self.name)
            span.set_attribute("instance_id", instance.instance_id)
            span.set_attribute("r", budgets.r)
            span.set_attribute("k", budgets.k)
            try:
                prediction = self._solve_impl(instance, budgets)
            except TooLargeException:
                record_guard_trip(self.name)
                raise
            span.set_attribute("n", prediction.n)

        record_solve(self.name, prediction.time_us, prediction.n)
        return prediction

    @abstractmethod
    def _solve_impl(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        """Internal solve implementation, wrapped by :meth:`solve`."""
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.hierarchy!r})"
