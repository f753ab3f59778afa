"""Recursive best-first tree search over a hierarchically factorized distribution.

The search pops nodes by global mass from a priority queue seeded with the
root. A popped node extends the current partial solution; while the
complexity budget allows, each feasible extension starts a recursive search
on a copy of the queue. Node masses are the products of the parent-to-child
conditionals, computed as children are pushed, so only visited nodes are
ever scored.
"""

import heapq
import logging
import math
from typing import List, Optional, Tuple

from hsvp.core.errors import InfeasibleBudgetException
from hsvp.core.hierarchy import Hierarchy
from hsvp.core.prob import HierarchicalDistribution, ProblemInstance
from hsvp.eval.timing import Stopwatch
from hsvp.models import Budgets, Prediction
from hsvp.solvers.base import BaseSolver

logger = logging.getLogger(__name__)


class SearchQueue:
    """Max-priority queue of (node, global mass).

    Pops by mass descending; equal masses pop by node id ascending.
    """

    def __init__(self, entries: Optional[List[Tuple[float, int]]] = None):
        # heap of (-mass, node)
        self._heap: List[Tuple[float, int]] = entries if entries is not None else []

    def push(self, node: int, mass: float) -> None:
        heapq.heappush(self._heap, (-mass, node))

    def pop(self) -> Tuple[int, float]:
        negated, node = heapq.heappop(self._heap)
        return node, -negated

    def copy(self) -> "SearchQueue":
        return SearchQueue(list(self._heap))

    def snapshot(self) -> Tuple[Tuple[int, float], ...]:
        """Contents in pop order, without modifying the queue."""
        return tuple((node, -negated) for negated, node in sorted(self._heap))

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


class RtsTrace:
    """Records what a search did, for inspection in tests and debugging.

    Attributes:
        pops: (remaining depth, node, mass) per pop, in pop order
        isolation: One flag per recursive call, True when the caller's queue
            was unchanged after the call returned
    """

    def __init__(self):
        self.pops: List[Tuple[int, int, float]] = []
        self.isolation: List[bool] = []

    def pops_at(self, depth: int) -> List[Tuple[int, float]]:
        """(node, mass) pops made with the given remaining depth."""
        return [(node, mass) for d, node, mass in self.pops if d == depth]


class _Search:
    """State shared by the recursive calls of one solve."""

    def __init__(
        self,
        h: Hierarchy,
        d: HierarchicalDistribution,
        k: int,
        trace: Optional[RtsTrace],
    ):
        self.h = h
        self.conds = d.child_cond
        self.k = k
        self.trace = trace
        self.pops = 0
        self.best_mass = 0.0
        self.best_nodes: Tuple[int, ...] = ()

    def find(
        self,
        queue: SearchQueue,
        chosen: Tuple[int, ...],
        size: int,
        mass: float,
        depth: int,
    ) -> None:
        h = self.h
        while queue:
            v, p_v = queue.pop()
            self.pops += 1
            if self.trace is not None:
                self.trace.pops.append((depth, v, p_v))
            if __debug__:
                assert not any(h.overlaps(v, u) for u in chosen), (
                    f"popped node {v} overlaps partial solution {chosen}"
                )

            extended_size = size + h.width(v)
            if extended_size <= self.k:
                extended = chosen + (v,)
                extended_mass = mass + p_v
                if extended_mass >= self.best_mass:
                    self.best_mass = extended_mass
                    self.best_nodes = extended
                if depth > 1 and extended_size < self.k:
                    self._recurse(queue, extended, extended_size, extended_mass, depth - 1)
                elif depth == 1:
                    break

            children = h.children_of[v]
            if not children:
                break
            for child, cond in zip(children, self.conds[v]):
                queue.push(child, p_v * float(cond))

    def _recurse(
        self,
        queue: SearchQueue,
        chosen: Tuple[int, ...],
        size: int,
        mass: float,
        depth: int,
    ) -> None:
        if self.trace is None:
            self.find(queue.copy(), chosen, size, mass, depth)
            return
        before = queue.snapshot()
        self.find(queue.copy(), chosen, size, mass, depth)
        self.trace.isolation.append(queue.snapshot() == before)


def solve_rts(
    h: Hierarchy,
    d: HierarchicalDistribution,
    b: Budgets,
    trace: Optional[RtsTrace] = None,
) -> Prediction:
    """Bayes-optimal set under the budgets by recursive best-first search.

    Args:
        h: Hierarchy
        d: Conditionals for every internal node of h
        b: Budgets
        trace: Optional recorder of pops and queue isolation

    Returns:
        Prediction; n is the number of pops over all recursion levels

    Raises:
        InfeasibleBudgetException: If r < 1 or k < 1
    """
    if b.r < 1 or b.k < 1:
        raise InfeasibleBudgetException(f"no non-empty set fits {b}")

    search = _Search(h, d, b.k, trace)
    with Stopwatch() as watch:
        queue = SearchQueue()
        queue.push(h.root, 1.0)
        search.find(queue, (), 0, 0.0, b.r)

    nodes = tuple(sorted(search.best_nodes, key=lambda v: h.leaf_interval[v][0]))
    classes = frozenset(c for v in nodes for c in range(*h.leaf_interval[v]))
    return Prediction(
        solver="rts",
        budgets=b,
        classes=classes,
        mass=search.best_mass,
        n=search.pops,
        time_us=watch.elapsed_us,
        nodes=nodes,
    )


def pop_count_bound(class_count: int, r: int) -> int:
    """(ceil(log2 K))^r, the pop bound stated for complete binary trees."""
    return math.ceil(math.log2(class_count)) ** r


def pop_count_report(h: Hierarchy, d: HierarchicalDistribution, b: Budgets) -> int:
    """Solve and return the pop count, logging it next to the stated bound."""
    prediction = solve_rts(h, d, b)
    bound = pop_count_bound(h.class_count, b.r)
    logger.info(
        f"RTS popped {prediction.n} nodes for {b} on {h!r} "
        f"(binary-tree bound {bound})"
    )
    return prediction.n


class RtsSolver(BaseSolver):
    """Tree-search solver; works on conditionals, converting flat inputs."""

    name = "rts"

    def _solve_impl(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        return solve_rts(self.hierarchy, instance.as_hier(self.hierarchy), budgets)
