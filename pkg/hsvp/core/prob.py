"""Flat and hierarchically factorized conditional class distributions.

A flat distribution holds P(c|x) for every class. A hierarchical one holds,
for every internal node, the conditional probabilities of its children; the
mass of a node is the product of the conditionals along its root path.
"""

import logging
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np

from hsvp.core.errors import (
    DimensionMismatchException,
    InvalidDistributionException,
)
from hsvp.core.hierarchy import Hierarchy

logger = logging.getLogger(__name__)

# Accepted normalization error of input distributions
INPUT_TOLERANCE = 1e-9
# Tolerance of identities between derived quantities
INTERNAL_TOLERANCE = 1e-12


def _renormalize_tolerance() -> float:
    from hsvp.config.settings import get_solver_config

    return get_solver_config().renormalize_tolerance


def _checked_vector(values: Iterable[float], what: str) -> np.ndarray:
    """Validate a probability vector, renormalizing small normalization errors.

    Raises:
        InvalidDistributionException: On entries outside [0, 1], non-finite
            entries, or a sum too far from 1
    """
    vector = np.asarray(list(values), dtype=np.float64)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidDistributionException(f"{what}: expected a non-empty vector")
    if not np.all(np.isfinite(vector)):
        raise InvalidDistributionException(f"{what}: non-finite probability")
    if np.any(vector < 0.0) or np.any(vector > 1.0 + INPUT_TOLERANCE):
        raise InvalidDistributionException(f"{what}: probabilities must lie in [0, 1]")

    total = float(vector.sum())
    error = abs(total - 1.0)
    if error > INPUT_TOLERANCE:
        if error > _renormalize_tolerance():
            raise InvalidDistributionException(
                f"{what}: probabilities sum to {total!r}, expected 1"
            )
        logger.warning(f"{what}: renormalizing probabilities summing to {total!r}")
        vector = vector / total
    vector = np.minimum(vector, 1.0)
    vector.setflags(write=False)
    return vector


class FlatDistribution:
    """Conditional class probabilities P(c|x) over K classes."""

    def __init__(self, probs: Iterable[float]):
        """Initialize distribution.

        Args:
            probs: K non-negative probabilities summing to 1

        Raises:
            InvalidDistributionException: If the vector is not a distribution
        """
        self.probs = _checked_vector(probs, "flat distribution")

    @property
    def class_count(self) -> int:
        return int(self.probs.size)

    def __repr__(self) -> str:
        return f"FlatDistribution(K={self.class_count})"


class HierarchicalDistribution:
    """Per-internal-node conditionals P(child | node, x).

    Attributes:
        child_cond: internal node -> conditionals aligned with its children
    """

    def __init__(self, h: Hierarchy, child_cond: Mapping[int, Sequence[float]]):
        """Initialize distribution.

        Args:
            h: Hierarchy whose internal nodes key the conditionals
            child_cond: One conditional vector per internal node

        Raises:
            InvalidDistributionException: If keys differ from the internal
                nodes, a vector has the wrong length or is not a distribution
        """
        internal = set(h.internal_nodes)
        keys = {int(v) for v in child_cond}
        if keys != internal:
            missing = sorted(internal - keys)
            extra = sorted(keys - internal)
            raise InvalidDistributionException(
                f"conditionals must be keyed by internal nodes "
                f"(missing {missing}, unexpected {extra})"
            )

        conds: Dict[int, np.ndarray] = {}
        for v, values in child_cond.items():
            vector = _checked_vector(values, f"conditionals of node {v}")
            expected = len(h.children_of[int(v)])
            if vector.size != expected:
                raise InvalidDistributionException(
                    f"conditionals of node {v}: expected {expected} values, "
                    f"got {vector.size}"
                )
            conds[int(v)] = vector
        self.child_cond: Mapping[int, np.ndarray] = conds
        self.node_count = h.node_count

    def __repr__(self) -> str:
        return f"HierarchicalDistribution(internal={len(self.child_cond)})"


class NodeMasses:
    """Probability mass P(v|x) of every node."""

    def __init__(self, h: Hierarchy, mass: Mapping[int, float]):
        """Initialize and check conservation.

        Raises:
            InvalidDistributionException: If the root mass is not 1 or some
                internal node's children do not sum to its mass
        """
        if abs(mass[h.root] - 1.0) > INPUT_TOLERANCE:
            raise InvalidDistributionException(
                f"root mass is {mass[h.root]!r}, expected 1"
            )
        for v in h.internal_nodes:
            total = sum(mass[c] for c in h.children_of[v])
            if abs(total - mass[v]) > INPUT_TOLERANCE:
                raise InvalidDistributionException(
                    f"children of node {v} hold {total!r}, node holds {mass[v]!r}"
                )
        self.mass: Mapping[int, float] = dict(mass)

    def __getitem__(self, v: int) -> float:
        return self.mass[v]


def check_class_count(h: Hierarchy, d: FlatDistribution) -> None:
    """Raise DimensionMismatchException unless d has K classes."""
    if d.class_count != h.class_count:
        raise DimensionMismatchException(h.class_count, d.class_count)


def set_mass(d: FlatDistribution, Y: Iterable[int]) -> float:
    """P(Y|x): the summed probability of the classes in Y (0 for the empty set)."""
    return float(sum(d.probs[c] for c in sorted(Y)))


def all_node_masses(h: Hierarchy, d: FlatDistribution) -> NodeMasses:
    """Masses of all nodes, summed bottom-up in one pass.

    Raises:
        DimensionMismatchException: If d does not have K classes
    """
    check_class_count(h, d)
    mass: Dict[int, float] = {}
    for v in reversed(h.preorder):
        children = h.children_of[v]
        if children:
            mass[v] = sum(mass[c] for c in children)
        else:
            mass[v] = float(d.probs[h.leaf_interval[v][0]])
    return NodeMasses(h, mass)


def node_mass_chain(h: Hierarchy, d: HierarchicalDistribution, v: int) -> float:
    """Mass of v as the product of conditionals along the root path.

    Raises:
        UnknownNodeException: If v is not a node of h
    """
    h.check_node(v)
    mass = 1.0
    node = v
    while node != h.root:
        parent = h.parent_of[node]
        position = h.children_of[parent].index(node)
        mass *= float(d.child_cond[parent][position])
        node = parent
    return mass


def top_down_masses(h: Hierarchy, d: HierarchicalDistribution) -> Dict[int, float]:
    """Chain-rule masses of every node in one top-down pass."""
    mass: Dict[int, float] = {h.root: 1.0}
    for v in h.preorder:
        children = h.children_of[v]
        if children:
            conds = d.child_cond[v]
            for position, c in enumerate(children):
                mass[c] = mass[v] * float(conds[position])
    return mass


def flat_to_hier(h: Hierarchy, d: FlatDistribution) -> HierarchicalDistribution:
    """Factorize a flat distribution along the hierarchy.

    Each child conditional is the child's mass over its parent's mass. A
    parent without mass gives its children the uniform conditional.
    """
    masses = all_node_masses(h, d)
    conds: Dict[int, list] = {}
    for v in h.internal_nodes:
        children = h.children_of[v]
        parent_mass = masses[v]
        if parent_mass > 0.0:
            values = [masses[c] / parent_mass for c in children]
            total = sum(values)
            conds[v] = [x / total for x in values]
        else:
            conds[v] = [1.0 / len(children)] * len(children)
    return HierarchicalDistribution(h, conds)


def hier_to_flat(h: Hierarchy, d: HierarchicalDistribution) -> FlatDistribution:
    """Leaf masses of a hierarchical distribution as a flat distribution."""
    mass = top_down_masses(h, d)
    return FlatDistribution(mass[leaf] for leaf in h.leaf_nodes)


def top_k_mass(d: FlatDistribution, k: int) -> float:
    """Sum of the k largest class probabilities."""
    ordered = np.sort(d.probs)[::-1]
    return float(ordered[:k].sum())


class ProblemInstance:
    """One instance to solve: a flat and/or a hierarchical distribution.

    Whichever form a solver needs is derived on demand from the one given.
    """

    def __init__(
        self,
        instance_id: str,
        flat: Optional[FlatDistribution] = None,
        hier: Optional[HierarchicalDistribution] = None,
        y_true: int = -1,
    ):
        if flat is None and hier is None:
            raise InvalidDistributionException(
                f"instance {instance_id}: no distribution given"
            )
        self.instance_id = instance_id
        self.flat = flat
        self.hier = hier
        self.y_true = y_true

    def as_flat(self, h: Hierarchy) -> FlatDistribution:
        if self.flat is not None:
            check_class_count(h, self.flat)
            return self.flat
        return hier_to_flat(h, self.hier)

    def as_hier(self, h: Hierarchy) -> HierarchicalDistribution:
        if self.hier is not None:
            return self.hier
        return flat_to_hier(h, self.flat)

    def __repr__(self) -> str:
        return f"ProblemInstance({self.instance_id!r}, y_true={self.y_true})"
