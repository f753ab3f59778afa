"""Exhaustive solver: feasible-set incidence matrix times the class vector."""

import logging
import math
import threading
from typing import Dict, Optional, Tuple, Union

import numpy as np

from hsvp.config.models import SolverConfig
from hsvp.core.errors import DimensionMismatchException, TooLargeException
from hsvp.core.hierarchy import ClassSet, Hierarchy, enumerate_feasible_covers
from hsvp.core.prob import FlatDistribution, ProblemInstance
from hsvp.eval.timing import Stopwatch
from hsvp.models import Budgets, Prediction
from hsvp.models.outputs import TIE_TOLERANCE
from hsvp.solvers.base import BaseSolver

logger = logging.getLogger(__name__)


class FeasibleMatrix:
    """Binary incidence matrix of the feasible sets for fixed budgets.

    Row i is the i-th feasible set in lexicographic member order; entry
    (i, j) is 1 iff class j belongs to it. Entries are stored as float64 so
    the product with a probability vector needs no conversion.

    Attributes:
        budgets: Budgets the rows satisfy
        row_sets: Feasible class sets, in row order
        row_nodes: Minimum cover of each row
        incidence: |rows| x K read-only matrix
    """

    def __init__(
        self,
        budgets: Budgets,
        row_sets: Tuple[ClassSet, ...],
        row_nodes: Tuple[Tuple[int, ...], ...],
        incidence: np.ndarray,
    ):
        self.budgets = budgets
        self.row_sets = row_sets
        self.row_nodes = row_nodes
        incidence.setflags(write=False)
        self.incidence = incidence

    @property
    def rows(self) -> int:
        return self.incidence.shape[0]

    @property
    def class_count(self) -> int:
        return self.incidence.shape[1]

    def __repr__(self) -> str:
        return f"FeasibleMatrix({self.rows}x{self.class_count}, {self.budgets})"


def build_matrix(
    h: Hierarchy, b: Budgets, guard: Optional[int] = None
) -> FeasibleMatrix:
    """Build the incidence matrix of every feasible set.

    Args:
        h: Hierarchy
        b: Budgets
        guard: Row limit; defaults to the configured limit, which also caps
            the number of matrix cells

    Returns:
        Feasible matrix

    Raises:
        TooLargeException: If the feasible set exceeds the row limit
    """
    if guard is None:
        from hsvp.config.settings import get_solver_config

        guard = get_solver_config().mvm_row_guard(h.class_count)

    rows = enumerate_feasible_covers(h, b, guard)
    lengths = np.fromiter((len(members) for members, _ in rows), dtype=np.int64)
    row_index = np.repeat(np.arange(len(rows)), lengths)
    col_index = np.fromiter(
        (c for members, _ in rows for c in members),
        dtype=np.int64,
        count=int(lengths.sum()),
    )
    incidence = np.zeros((len(rows), h.class_count), dtype=np.float64)
    incidence[row_index, col_index] = 1.0

    matrix = FeasibleMatrix(
        budgets=b,
        row_sets=tuple(frozenset(members) for members, _ in rows),
        row_nodes=tuple(nodes for _, nodes in rows),
        incidence=incidence,
    )
    logger.info(f"Built {matrix!r}")
    return matrix


def solve_mvm(m: FeasibleMatrix, d: FlatDistribution) -> Prediction:
    """Bayes-optimal set by one matrix-vector product and an argmax.

    Rows within TIE_TOLERANCE of the maximum are tied and the earliest one
    wins, i.e. the lexicographically smallest set. The reported mass is the
    exactly rounded sum over the winning members.

    Args:
        m: Feasible matrix for the budgets
        d: Flat distribution

    Returns:
        Prediction with n = number of feasible sets

    Raises:
        DimensionMismatchException: If d does not have the matrix's K classes
    """
    if d.class_count != m.class_count:
        raise DimensionMismatchException(m.class_count, d.class_count)

    with Stopwatch() as watch:
        set_masses = m.incidence @ d.probs
        top = set_masses.max()
        best = int(np.flatnonzero(set_masses >= top - TIE_TOLERANCE)[0])
        mass = math.fsum(d.probs[c] for c in m.row_sets[best])

    return Prediction(
        solver="mvm",
        budgets=m.budgets,
        classes=m.row_sets[best],
        mass=mass,
        n=m.rows,
        time_us=watch.elapsed_us,
        nodes=m.row_nodes[best],
    )


class MvmSolver(BaseSolver):
    """Feasible-set matrix solver; one matrix per budget pair, built on demand."""

    name = "mvm"

    def __init__(self, hierarchy: Hierarchy, config: Optional[SolverConfig] = None):
        super().__init__(hierarchy, config)
        self._matrices: Dict[Budgets, Union[FeasibleMatrix, TooLargeException]] = {}
        self._lock = threading.Lock()

    def matrix(self, budgets: Budgets) -> FeasibleMatrix:
        """Cached feasible matrix for the budgets.

        A guard trip is cached too, so a refused budget pair is enumerated
        only once.

        Raises:
            TooLargeException: If the feasible set exceeds the row limit
        """
        with self._lock:
            cached = self._matrices.get(budgets)
            if cached is None:
                guard = self.config.mvm_row_guard(self.hierarchy.class_count)
                try:
                    cached = build_matrix(self.hierarchy, budgets, guard)
                except TooLargeException as e:
                    cached = e
                self._matrices[budgets] = cached
        if isinstance(cached, TooLargeException):
            raise cached
        return cached

    def prepare(self, budgets: Budgets) -> None:
        self.matrix(budgets)

    def _solve_impl(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        return solve_mvm(self.matrix(budgets), instance.as_flat(self.hierarchy))
