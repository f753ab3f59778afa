"""Knapsack with conflict graph over hierarchy nodes, solved by branch-and-bound.

Items are hierarchy nodes. An item's value is the node's mass and its weight
the number of classes below it. At most r items may be packed, their weights
may sum to at most k, and no two packed items may overlap (an ancestor and
its descendant conflict).
"""

import logging
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import numpy as np

from hsvp.config.models import SolverConfig
from hsvp.core.hierarchy import ROOT_PARENT, Hierarchy
from hsvp.core.prob import NodeMasses, ProblemInstance, all_node_masses
from hsvp.eval.timing import Stopwatch
from hsvp.models import Budgets, Prediction
from hsvp.solvers.base import BaseSolver

logger = logging.getLogger(__name__)


class ConflictGraph:
    """Conflict edges between overlapping nodes.

    Attributes:
        edges: (ancestor, descendant) pairs
        adjacency: node -> nodes it conflicts with
    """

    def __init__(self, edges: FrozenSet[Tuple[int, int]], nodes: Tuple[int, ...]):
        self.edges = edges
        adjacency: Dict[int, set] = {v: set() for v in nodes}
        for u, v in edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        self.adjacency: Mapping[int, FrozenSet[int]] = {
            v: frozenset(neighbours) for v, neighbours in adjacency.items()
        }

    def conflicts(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"ConflictGraph(edges={len(self.edges)})"


def build_conflict_graph(h: Hierarchy) -> ConflictGraph:
    """Connect every node to each of its ancestors."""
    edges = []
    for v in h.preorder:
        ancestor = h.parent_of[v]
        while ancestor != ROOT_PARENT:
            edges.append((ancestor, v))
            ancestor = h.parent_of[ancestor]
    graph = ConflictGraph(frozenset(edges), h.preorder)
    logger.debug(f"Built {graph!r} for {h!r}")
    return graph


def ilp_dimensions(h: Hierarchy) -> Tuple[int, int]:
    """Shape of the constraint matrix: (2 + number of conflict edges, M)."""
    edge_count = sum(h.depth(v) for v in h.preorder)
    return 2 + edge_count, h.node_count


def constraint_matrix(
    h: Hierarchy, b: Budgets, graph: Optional[ConflictGraph] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Assemble the integer program's constraints A z <= rhs explicitly.

    Columns follow ``h.preorder``. The first row counts nodes, the second
    weighs them by class count, and one row per conflict edge forbids
    packing both endpoints.

    Args:
        h: Hierarchy
        b: Budgets
        graph: Conflict graph, built when omitted

    Returns:
        (A, rhs) with A of shape ilp_dimensions(h)
    """
    graph = graph or build_conflict_graph(h)
    column = {v: j for j, v in enumerate(h.preorder)}
    rows, cols = ilp_dimensions(h)

    A = np.zeros((rows, cols), dtype=np.int64)
    A[0, :] = 1
    A[1, :] = [h.width(v) for v in h.preorder]
    for i, (u, v) in enumerate(sorted(graph.edges, key=lambda e: (column[e[0]], column[e[1]]))):
        A[2 + i, column[u]] = 1
        A[2 + i, column[v]] = 1

    rhs = np.ones(rows, dtype=np.int64)
    rhs[0] = b.r
    rhs[1] = b.k
    return A, rhs


class KcgInstance:
    """Knapsack-with-conflicts instance for one distribution and budgets.

    Attributes:
        hierarchy: Hierarchy the items come from
        nodes: Item node ids, in ``hierarchy.preorder`` order
        item_mass: Node masses
        item_weight: Class counts
        conflicts: Conflict graph
        count_budget: Maximum number of items (r)
        weight_budget: Maximum total weight (k)
    """

    def __init__(
        self,
        hierarchy: Hierarchy,
        item_mass: Tuple[float, ...],
        conflicts: ConflictGraph,
        budgets: Budgets,
    ):
        self.hierarchy = hierarchy
        self.nodes = hierarchy.preorder
        self.item_mass = item_mass
        self.item_weight = tuple(hierarchy.width(v) for v in self.nodes)
        self.conflicts = conflicts
        self.budgets = budgets

    @property
    def count_budget(self) -> int:
        return self.budgets.r

    @property
    def weight_budget(self) -> int:
        return self.budgets.k


def build_kcg_instance(
    h: Hierarchy,
    masses: NodeMasses,
    b: Budgets,
    conflicts: Optional[ConflictGraph] = None,
) -> KcgInstance:
    """Pair node masses with weights, conflicts and budgets."""
    return KcgInstance(
        hierarchy=h,
        item_mass=tuple(float(masses[v]) for v in h.preorder),
        conflicts=conflicts or build_conflict_graph(h),
        budgets=b,
    )


def solve_kcg(inst: KcgInstance, prune: bool = True) -> Prediction:
    """Exact depth-first branch-and-bound.

    Items are visited by mass descending, node id ascending. Each search
    node either packs the next eligible item or skips it; packing is tried
    first. A subtree is cut when the packed mass plus the masses of the best
    eligible items that still fit the count budget cannot beat the
    incumbent, when a budget is used up, or when no item remains eligible.
    Only strictly better selections replace the incumbent, so the first
    optimum found wins.

    Args:
        inst: Instance
        prune: Cut subtrees by the upper bound (disable only to validate it)

    Returns:
        Prediction; n is the size of the constraint matrix and diagnostics
        hold its rows and columns plus the number of search nodes
    """
    h = inst.hierarchy
    r, k = inst.count_budget, inst.weight_budget

    with Stopwatch() as watch:
        order = sorted(
            (j for j in range(len(inst.nodes)) if inst.item_weight[j] <= k),
            key=lambda j: (-inst.item_mass[j], inst.nodes[j]),
        )
        nodes = [inst.nodes[j] for j in order]
        masses = [inst.item_mass[j] for j in order]
        weights = [inst.item_weight[j] for j in order]
        adjacency = inst.conflicts.adjacency

        def eligible(i: int, chosen: Tuple[int, ...], capacity: int) -> bool:
            if weights[i] > capacity:
                return False
            neighbours = adjacency[nodes[i]]
            return not any(c in neighbours for c in chosen)

        def next_eligible(start: int, chosen: Tuple[int, ...], capacity: int) -> int:
            for i in range(start, len(nodes)):
                if eligible(i, chosen, capacity):
                    return i
            return -1

        def best_completion(start: int, chosen: Tuple[int, ...], capacity: int, slots: int) -> float:
            total = 0.0
            i = start
            while slots > 0:
                i = next_eligible(i, chosen, capacity)
                if i < 0:
                    break
                total += masses[i]
                slots -= 1
                i += 1
            return total

        best_mass = -1.0
        best: Tuple[int, ...] = ()
        visited = 0

        # frame: [cursor, packed nodes, packed weight, packed mass]
        frames: List[list] = [[0, (), 0, 0.0]]
        while frames:
            frame = frames[-1]
            cursor, chosen, used, mass = frame
            capacity = k - used
            if len(chosen) >= r or capacity <= 0:
                frames.pop()
                continue
            i = next_eligible(cursor, chosen, capacity)
            if i < 0:
                frames.pop()
                continue
            visited += 1
            if prune:
                upper = mass + best_completion(i, chosen, capacity, r - len(chosen))
                if upper <= best_mass:
                    frames.pop()
                    continue
            frame[0] = i + 1
            packed = chosen + (nodes[i],)
            packed_mass = mass + masses[i]
            if packed_mass > best_mass:
                best_mass, best = packed_mass, packed
            frames.append([i + 1, packed, used + weights[i], packed_mass])

    rows, cols = ilp_dimensions(h)
    selected = tuple(sorted(best, key=lambda v: h.leaf_interval[v][0]))
    classes = frozenset(c for v in selected for c in range(*h.leaf_interval[v]))
    return Prediction(
        solver="kcg",
        budgets=inst.budgets,
        classes=classes,
        mass=best_mass,
        n=rows * cols,
        time_us=watch.elapsed_us,
        nodes=selected,
        diagnostics={"ilp_rows": rows, "ilp_cols": cols, "bnb_nodes": visited},
    )


class KcgSolver(BaseSolver):
    """Knapsack-with-conflicts solver sharing one conflict graph across instances."""

    name = "kcg"

    def __init__(self, hierarchy: Hierarchy, config: Optional[SolverConfig] = None):
        super().__init__(hierarchy, config)
        self.conflicts = build_conflict_graph(hierarchy)

    def _solve_impl(self, instance: ProblemInstance, budgets: Budgets) -> Prediction:
        masses = all_node_masses(self.hierarchy, instance.as_flat(self.hierarchy))
        inst = build_kcg_instance(self.hierarchy, masses, budgets, self.conflicts)
        return solve_kcg(inst)
