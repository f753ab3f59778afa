"""Seeded synthetic hierarchies and probability rows."""

import logging
from collections import deque
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hsvp.core.hierarchy import ROOT_PARENT, Hierarchy, build_hierarchy
from hsvp.core.prob import FlatDistribution, ProblemInstance
from hsvp.models import GenConfig

logger = logging.getLogger(__name__)


def _check_class_count(class_count: int) -> None:
    if class_count < 2:
        raise ValueError(f"A hierarchy needs at least 2 classes, got {class_count}")


def _grow(class_count: int, split) -> Hierarchy:
    """Breadth-first growth: each node of size > 1 is divided by ``split``."""
    edges: List[Tuple[int, int]] = [(1, ROOT_PARENT)]
    pending = deque([(1, class_count)])
    next_id = 2
    while pending:
        node, size = pending.popleft()
        if size == 1:
            continue
        for part in split(size):
            edges.append((next_id, node))
            pending.append((next_id, part))
            next_id += 1
    return build_hierarchy(edges)


def random_hierarchy(
    class_count: int, branching: float, rng: np.random.Generator
) -> Hierarchy:
    """Random tree over K classes built by recursive random splits.

    A node holding ``size`` classes gets ``min(size, max(2, 2 + X))``
    children with X ~ Poisson(branching - 2), and its classes are divided at
    random cut points, so every part is non-empty. Node ids are assigned in
    breadth-first order starting with the root at 1.

    Args:
        class_count: Number of classes K (>= 2)
        branching: Mean number of children of an internal node (>= 2)
        rng: Random generator

    Returns:
        Hierarchy with K leaves
    """
    _check_class_count(class_count)
    if branching < 2:
        raise ValueError(f"Mean branching factor must be >= 2, got {branching}")

    def split(size: int) -> Sequence[int]:
        children = min(size, max(2, 2 + int(rng.poisson(branching - 2))))
        cuts = np.sort(rng.choice(size - 1, children - 1, replace=False) + 1)
        return np.diff(np.concatenate(([0], cuts, [size]))).tolist()

    return _grow(class_count, split)


def balanced_hierarchy(class_count: int, branching: int = 2) -> Hierarchy:
    """Tree whose nodes divide their classes into near-equal parts.

    With K a power of ``branching`` the tree is complete.
    """
    _check_class_count(class_count)
    if branching < 2:
        raise ValueError(f"Branching factor must be >= 2, got {branching}")

    def split(size: int) -> Sequence[int]:
        children = min(size, branching)
        base, extra = divmod(size, children)
        return [base + (1 if i < extra else 0) for i in range(children)]

    return _grow(class_count, split)


def dirichlet_rows(
    class_count: int,
    count: int,
    rng: np.random.Generator,
    alpha: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetric Dirichlet probability rows and a true label sampled from each.

    Returns:
        (count x K probabilities, count labels)
    """
    if alpha <= 0:
        raise ValueError(f"Dirichlet concentration must be positive, got {alpha}")
    probs = rng.dirichlet(np.full(class_count, alpha), size=count)
    labels = np.array(
        [rng.choice(class_count, p=row / row.sum()) for row in probs], dtype=np.int64
    )
    return probs, labels


def generate_instances(
    class_count: int,
    count: int,
    seed: int = 0,
    alpha: float = 1.0,
    rng: Optional[np.random.Generator] = None,
) -> List[ProblemInstance]:
    """Labeled flat instances with ids "0", "1", ..."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    probs, labels = dirichlet_rows(class_count, count, rng, alpha)
    return [
        ProblemInstance(str(i), flat=FlatDistribution(row), y_true=int(y))
        for i, (row, y) in enumerate(zip(probs, labels))
    ]


def generate_dataset(gen: GenConfig) -> Tuple[Hierarchy, List[ProblemInstance]]:
    """Hierarchy and labeled instances drawn from one seeded generator."""
    rng = np.random.default_rng(gen.seed)
    if gen.shape == "balanced":
        hierarchy = balanced_hierarchy(gen.classes, int(round(gen.branching)))
    else:
        hierarchy = random_hierarchy(gen.classes, gen.branching, rng)
    instances = generate_instances(gen.classes, gen.instances, alpha=gen.alpha, rng=rng)
    logger.info(
        f"Generated {hierarchy!r} and {len(instances)} instances (seed {gen.seed})"
    )
    return hierarchy, instances
