"""Solver registry mapping names to solver classes."""

import logging
from typing import Dict, List, Optional, Type

from hsvp.config.models import SolverConfig
from hsvp.core.hierarchy import Hierarchy
from hsvp.solvers.base import BaseSolver
from hsvp.solvers.kcg import KcgSolver
from hsvp.solvers.mvm import MvmSolver
from hsvp.solvers.oracle import OracleSolver
from hsvp.solvers.rts import RtsSolver

logger = logging.getLogger(__name__)


class SolverRegistry:
    """Registry of available solvers."""

    def __init__(self):
        """Initialize solver registry."""
        self._solvers: Dict[str, Type[BaseSolver]] = {}

    def register(self, name: str, solver_cls: Type[BaseSolver]) -> None:
        """Register a solver class, replacing any previous one with the name.

        Args:
            name: Solver name
            solver_cls: Solver class
        """
        self._solvers[name] = solver_cls
        logger.debug(f"Registered solver: {name} (type: {solver_cls.__name__})")

    def unregister(self, name: str) -> None:
        self._solvers.pop(name, None)

    def get(self, name: str) -> Optional[Type[BaseSolver]]:
        """Get solver class by name.

        Args:
            name: Solver name

        Returns:
            Solver class or None if not found
        """
        return self._solvers.get(name)

    def list(self) -> List[str]:
        """List all registered solver names."""
        return list(self._solvers.keys())

    def create(
        self,
        name: str,
        hierarchy: Hierarchy,
        config: Optional[SolverConfig] = None,
    ) -> BaseSolver:
        """Instantiate a registered solver for a hierarchy.

        Raises:
            ValueError: If no solver is registered under the name
        """
        solver_cls = self.get(name)
        if solver_cls is None:
            raise ValueError(f"Unknown solver: {name}")
        return solver_cls(hierarchy, config)


# Global solver registry instance
solver_registry = SolverRegistry()
for _solver_cls in (MvmSolver, KcgSolver, RtsSolver, OracleSolver):
    solver_registry.register(_solver_cls.name, _solver_cls)
