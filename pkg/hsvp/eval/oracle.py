"""Exhaustive reference solver over all class subsets."""

import math
from itertools import combinations
from typing import List, Optional, Tuple

from hsvp.core.errors import TooLargeException
from hsvp.core.hierarchy import Hierarchy, min_cover
from hsvp.core.prob import FlatDistribution, check_class_count
from hsvp.eval.timing import Stopwatch
from hsvp.models import Budgets, Prediction
from hsvp.models.outputs import TIE_TOLERANCE


def oracle_solve(
    h: Hierarchy,
    d: FlatDistribution,
    b: Budgets,
    max_classes: Optional[int] = None,
) -> Prediction:
    """Best feasible set found by scoring every non-empty class subset.

    Subsets larger than k are never feasible and are not scored, but the
    reported n is the full 2^K - 1. Feasible sets within TIE_TOLERANCE of
    the best mass are tied; the one with the lexicographically smallest
    ascending member list wins.

    Args:
        h: Hierarchy
        d: Flat distribution
        b: Budgets
        max_classes: Largest K accepted (defaults to the configured limit)

    Returns:
        Prediction

    Raises:
        TooLargeException: If K exceeds max_classes
        DimensionMismatchException: If d does not have K classes
    """
    if max_classes is None:
        from hsvp.config.settings import get_solver_config

        max_classes = get_solver_config().oracle_max_classes
    K = h.class_count
    if K > max_classes:
        raise TooLargeException("class count K for the exhaustive oracle", max_classes, K)
    check_class_count(h, d)

    probs = d.probs.tolist()
    best_mass = -1.0
    tied: List[Tuple[int, ...]] = []

    # one pass for the best feasible mass, a second for the sets tied with it
    with Stopwatch() as watch:
        for size in range(1, min(b.k, K) + 1):
            for members in combinations(range(K), size):
                mass = math.fsum(probs[c] for c in members)
                if mass <= best_mass or not _fits(h, members, b.r):
                    continue
                best_mass = mass
        for size in range(1, min(b.k, K) + 1):
            for members in combinations(range(K), size):
                mass = math.fsum(probs[c] for c in members)
                if mass >= best_mass - TIE_TOLERANCE and _fits(h, members, b.r):
                    tied.append(members)
        best_members = min(tied)
        cover = min_cover(h, best_members)
        best_nodes = tuple(sorted(cover.nodes, key=lambda v: h.leaf_interval[v][0]))

    return Prediction(
        solver="oracle",
        budgets=b,
        classes=frozenset(best_members),
        mass=math.fsum(probs[c] for c in best_members),
        n=2**K - 1,
        time_us=watch.elapsed_us,
        nodes=best_nodes,
    )


def _fits(h: Hierarchy, members: Tuple[int, ...], r: int) -> bool:
    return min_cover(h, members).complexity <= r
