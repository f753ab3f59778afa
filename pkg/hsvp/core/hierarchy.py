"""Class hierarchies, representation complexity and feasible-set enumeration.

A hierarchy is a rooted tree whose leaves are the K classes. Every node stands
for the set of leaf classes below it. Class indices are assigned by a
depth-first traversal that visits children in declaration order, so the leaf
set of every node is a contiguous half-open interval ``[lo, hi)`` of class
indices. Subset and disjointness tests between nodes are interval comparisons.

Example:
    ```python
    from hsvp.core.hierarchy import build_hierarchy, min_cover

    h = build_hierarchy([(1, 0), (2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 3)])
    min_cover(h, frozenset({0, 2, 3})).complexity  # 2: nodes 4 and 3
    ```
"""

import logging
from bisect import bisect_left
from itertools import chain, combinations
from types import MappingProxyType
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from hsvp.core.errors import (
    ClassIndexException,
    CycleDetectedException,
    DuplicateNodeException,
    EmptySetException,
    InvalidHierarchyException,
    MultipleRootsException,
    TooLargeException,
    UnaryInternalNodeException,
    UnknownNodeException,
    UnknownParentException,
)
from hsvp.models import Budgets, Cover

logger = logging.getLogger(__name__)

# Parent id of the root node
ROOT_PARENT = 0

ClassSet = FrozenSet[int]


class Hierarchy:
    """Immutable, validated class hierarchy.

    Instances are created by :func:`build_hierarchy`. All mappings are
    read-only views, so a hierarchy can be shared between worker threads.

    Attributes:
        root: Root node id
        node_ids: Node ids in declaration order
        preorder: Node ids in depth-first order (children in declaration order)
        parent_of: node -> parent (the root maps to ``ROOT_PARENT``)
        children_of: node -> ordered children
        leaf_interval: node -> half-open class interval ``(lo, hi)``
        node_names: node -> label
    """

    def __init__(
        self,
        root: int,
        node_ids: Tuple[int, ...],
        preorder: Tuple[int, ...],
        parent_of: Dict[int, int],
        children_of: Dict[int, Tuple[int, ...]],
        leaf_interval: Dict[int, Tuple[int, int]],
        node_names: Dict[int, str],
    ):
        self.root = root
        self.node_ids = node_ids
        self.preorder = preorder
        self.parent_of: Mapping[int, int] = MappingProxyType(parent_of)
        self.children_of: Mapping[int, Tuple[int, ...]] = MappingProxyType(children_of)
        self.leaf_interval: Mapping[int, Tuple[int, int]] = MappingProxyType(
            leaf_interval
        )
        self.node_names: Mapping[int, str] = MappingProxyType(node_names)

        leaves = [v for v in preorder if not children_of[v]]
        self._leaf_nodes = tuple(leaves)

        depth: Dict[int, int] = {}
        for v in preorder:
            parent = parent_of[v]
            depth[v] = 0 if parent == ROOT_PARENT else depth[parent] + 1
        self._depth: Mapping[int, int] = MappingProxyType(depth)

    @property
    def node_count(self) -> int:
        """Number of nodes M."""
        return len(self.node_ids)

    @property
    def class_count(self) -> int:
        """Number of classes K."""
        return len(self._leaf_nodes)

    @property
    def internal_nodes(self) -> Tuple[int, ...]:
        """Internal nodes in depth-first order."""
        return tuple(v for v in self.preorder if self.children_of[v])

    @property
    def leaf_nodes(self) -> Tuple[int, ...]:
        """Leaf nodes indexed by class."""
        return self._leaf_nodes

    def check_node(self, v: int) -> None:
        """Raise UnknownNodeException unless v is a node."""
        if v not in self.parent_of:
            raise UnknownNodeException(v)

    def is_leaf(self, v: int) -> bool:
        return not self.children_of[v]

    def width(self, v: int) -> int:
        """Number of classes below v."""
        lo, hi = self.leaf_interval[v]
        return hi - lo

    def depth(self, v: int) -> int:
        return self._depth[v]

    def leaf_set(self, v: int) -> ClassSet:
        lo, hi = self.leaf_interval[v]
        return frozenset(range(lo, hi))

    def leaf_node(self, class_index: int) -> int:
        """Leaf node of a class index."""
        if not 0 <= class_index < self.class_count:
            raise ClassIndexException(class_index, self.class_count)
        return self._leaf_nodes[class_index]

    def overlaps(self, u: int, v: int) -> bool:
        """Whether the leaf sets of u and v intersect (ancestor or descendant)."""
        u_lo, u_hi = self.leaf_interval[u]
        v_lo, v_hi = self.leaf_interval[v]
        return u_lo < v_hi and v_lo < u_hi

    def class_set(self, members: Iterable[int]) -> ClassSet:
        """Validate class indices and return them as a class set.

        Raises:
            ClassIndexException: If an index lies outside [0, K)
        """
        result = frozenset(int(c) for c in members)
        for c in result:
            if not 0 <= c < self.class_count:
                raise ClassIndexException(c, self.class_count)
        return result

    def __repr__(self) -> str:
        return f"Hierarchy(M={self.node_count}, K={self.class_count}, root={self.root})"


def build_hierarchy(
    edges: Sequence[Tuple[int, int]],
    names: Optional[Mapping[int, str]] = None,
) -> Hierarchy:
    """Build and validate a hierarchy from (child, parent) edges.

    The root is the node whose parent is ``ROOT_PARENT``. Children keep the
    order in which their edges appear, and that order fixes the class index
    of every leaf.

    Args:
        edges: One (child node id, parent node id) pair per node
        names: Optional node labels; defaults to the node id

    Returns:
        Validated hierarchy

    Raises:
        DuplicateNodeException: If a node id appears twice
        UnknownParentException: If a parent id is not a node
        MultipleRootsException: If more than one node has the root parent
        CycleDetectedException: If some node is its own ancestor
        UnaryInternalNodeException: If an internal node has a single child
        InvalidHierarchyException: For empty input, non-positive ids or
            fewer than two classes
    """
    if not edges:
        raise InvalidHierarchyException("Hierarchy has no nodes")

    parent_of: Dict[int, int] = {}
    node_ids: List[int] = []
    for child, parent in edges:
        child, parent = int(child), int(parent)
        if child <= 0:
            raise InvalidHierarchyException(f"Node ids must be positive, got {child}")
        if child in parent_of:
            raise DuplicateNodeException(child)
        parent_of[child] = parent
        node_ids.append(child)

    for child in node_ids:
        parent = parent_of[child]
        if parent == child:
            raise CycleDetectedException(child)
        if parent != ROOT_PARENT and parent not in parent_of:
            raise UnknownParentException(child, parent)

    roots = [v for v in node_ids if parent_of[v] == ROOT_PARENT]
    if len(roots) > 1:
        raise MultipleRootsException(roots)
    if not roots:
        # every node has a parent, so the parent chains must loop
        raise CycleDetectedException(node_ids[0])
    root = roots[0]

    children: Dict[int, List[int]] = {v: [] for v in node_ids}
    for v in node_ids:
        if v != root:
            children[parent_of[v]].append(v)

    preorder: List[int] = []
    stack = [root]
    while stack:
        v = stack.pop()
        preorder.append(v)
        stack.extend(reversed(children[v]))

    if len(preorder) < len(node_ids):
        visited = set(preorder)
        unreached = next(v for v in node_ids if v not in visited)
        raise CycleDetectedException(unreached)

    for v in node_ids:
        if len(children[v]) == 1:
            raise UnaryInternalNodeException(v)
    if not children[root]:
        raise InvalidHierarchyException("Hierarchy needs at least two classes")

    lo: Dict[int, int] = {}
    next_class = 0
    for v in preorder:
        lo[v] = next_class
        if not children[v]:
            next_class += 1

    interval: Dict[int, Tuple[int, int]] = {}
    for v in reversed(preorder):
        hi = lo[v] + 1 if not children[v] else interval[children[v][-1]][1]
        interval[v] = (lo[v], hi)

    labels = {v: str(v) for v in node_ids}
    if names:
        labels.update({int(v): str(name) for v, name in names.items() if v in labels})

    hierarchy = Hierarchy(
        root=root,
        node_ids=tuple(node_ids),
        preorder=tuple(preorder),
        parent_of=parent_of,
        children_of={v: tuple(c) for v, c in children.items()},
        leaf_interval=interval,
        node_names=labels,
    )
    logger.debug(f"Built {hierarchy!r}")
    return hierarchy


def _member_counter(members: ClassSet):
    ordered = sorted(members)

    def count(lo: int, hi: int) -> int:
        return bisect_left(ordered, hi) - bisect_left(ordered, lo)

    return count


def min_cover(h: Hierarchy, Y: Iterable[int]) -> Cover:
    """Minimum disjoint node cover of a class set.

    Any two node leaf sets are nested or disjoint, so the maximal nodes whose
    leaf set lies inside Y form the unique minimum cover. Its size is the
    representation complexity of Y.

    Args:
        h: Hierarchy
        Y: Non-empty class set

    Returns:
        Cover with the maximal nodes

    Raises:
        EmptySetException: If Y is empty
        ClassIndexException: If Y holds an index outside [0, K)
    """
    members = h.class_set(Y)
    if not members:
        raise EmptySetException("min_cover")
    count = _member_counter(members)

    nodes: List[int] = []
    stack = [h.root]
    while stack:
        v = stack.pop()
        lo, hi = h.leaf_interval[v]
        inside = count(lo, hi)
        if inside == 0:
            continue
        if inside == hi - lo:
            nodes.append(v)
            continue
        stack.extend(reversed(h.children_of[v]))
    return Cover(nodes=frozenset(nodes), complexity=len(nodes))


def representation_complexity(h: Hierarchy, Y: Iterable[int]) -> int:
    """R(Y): the size of the minimum cover of Y."""
    return min_cover(h, Y).complexity


def all_covers(
    h: Hierarchy, Y: Iterable[int], max_nodes: Optional[int] = None
) -> List[Tuple[int, ...]]:
    """Every set of pairwise-disjoint nodes whose leaf sets union to Y.

    Exhaustive; meant for small hierarchies and tests.

    Args:
        h: Hierarchy
        Y: Non-empty class set
        max_nodes: Largest M accepted (defaults to the configured limit)

    Returns:
        Node tuples in depth-first order of their first class

    Raises:
        TooLargeException: If M exceeds max_nodes
        EmptySetException: If Y is empty
    """
    limit = max_nodes if max_nodes is not None else _solver_config().cover_oracle_max_nodes
    if h.node_count > limit:
        raise TooLargeException("node count M", limit, h.node_count)
    members = h.class_set(Y)
    if not members:
        raise EmptySetException("all_covers")
    count = _member_counter(members)

    starting_at: Dict[int, List[int]] = {}
    for v in h.preorder:
        lo, hi = h.leaf_interval[v]
        if count(lo, hi) == hi - lo:
            starting_at.setdefault(lo, []).append(v)

    ordered = sorted(members)
    covers: List[Tuple[int, ...]] = []

    # the smallest uncovered member must be the first class of the next node
    def extend(position: int, chosen: Tuple[int, ...]) -> None:
        if position == len(ordered):
            covers.append(chosen)
            return
        for v in starting_at.get(ordered[position], ()):
            hi = h.leaf_interval[v][1]
            extend(bisect_left(ordered, hi), chosen + (v,))

    extend(0, ())
    return covers


def min_cover_oracle(
    h: Hierarchy, Y: Iterable[int], max_nodes: Optional[int] = None
) -> Cover:
    """Minimum cover found by exhaustive search over all disjoint covers.

    Raises:
        TooLargeException: If M exceeds the exhaustive limit
        EmptySetException: If Y is empty
    """
    covers = all_covers(h, Y, max_nodes)
    best = min(covers, key=lambda nodes: (len(nodes), nodes))
    return Cover(nodes=frozenset(best), complexity=len(best))


def _solver_config():
    from hsvp.config.settings import get_solver_config

    return get_solver_config()


def enumerate_complexity_class(
    h: Hierarchy, r: int, max_classes: Optional[int] = None
) -> List[ClassSet]:
    """All non-empty class sets with representation complexity exactly r.

    Args:
        h: Hierarchy
        r: Complexity
        max_classes: Largest K accepted (defaults to the configured limit)

    Returns:
        Class sets sorted lexicographically by their ascending member lists

    Raises:
        TooLargeException: If K exceeds max_classes
    """
    limit = (
        max_classes
        if max_classes is not None
        else _solver_config().complexity_class_max_classes
    )
    if h.class_count > limit:
        raise TooLargeException("class count K", limit, h.class_count)

    found: List[Tuple[int, ...]] = []
    for size in range(max(r, 1), h.class_count + 1):
        for members in combinations(range(h.class_count), size):
            if representation_complexity(h, members) == r:
                found.append(members)
    found.sort()
    return [frozenset(members) for members in found]


def _completes_parent(h: Hierarchy, v: int, chosen: Tuple[int, ...]) -> bool:
    parent = h.parent_of[v]
    if parent == ROOT_PARENT:
        return False
    siblings = h.children_of[parent]
    if siblings[-1] != v or len(chosen) < len(siblings) - 1:
        return False
    # chosen nodes are ordered by first class, so earlier siblings sit at the end
    return chosen[len(chosen) - len(siblings) + 1 :] == siblings[:-1]


def iter_feasible_covers(h: Hierarchy, b: Budgets) -> Iterator[Tuple[int, ...]]:
    """Lazily yield the minimum cover of every member of the feasible set.

    A feasible set has complexity at most r and at most k classes. Disjoint
    nodes are combined left to right; a combination is skipped (with all its
    extensions) as soon as it contains every child of some node, since then
    it is not the minimum cover of its union. Each feasible set is therefore
    produced exactly once.

    Args:
        h: Hierarchy
        b: Budgets

    Yields:
        Node tuples ordered by first class
    """
    starts: List[List[Tuple[int, int]]] = [[] for _ in range(h.class_count)]
    for v in h.preorder:
        lo, hi = h.leaf_interval[v]
        if hi - lo <= b.k:
            starts[lo].append((hi - lo, v))
    for candidates in starts:
        candidates.sort()

    def candidates_from(position: int, k_left: int) -> Iterator[Tuple[int, int, int]]:
        for lo in range(position, h.class_count):
            for width, v in starts[lo]:
                if width > k_left:
                    break
                yield lo, width, v

    frames = [(candidates_from(0, b.k), (), b.r, b.k)]
    while frames:
        candidates, chosen, r_left, k_left = frames[-1]
        step = next(candidates, None)
        if step is None:
            frames.pop()
            continue
        lo, width, v = step
        if _completes_parent(h, v, chosen):
            continue
        combo = chosen + (v,)
        yield combo
        if r_left > 1 and width < k_left:
            frames.append(
                (candidates_from(lo + width, k_left - width), combo, r_left - 1, k_left - width)
            )


def cover_members(h: Hierarchy, nodes: Iterable[int]) -> Tuple[int, ...]:
    """Classes below disjoint nodes given in first-class order, ascending."""
    return tuple(chain.from_iterable(range(*h.leaf_interval[v]) for v in nodes))


def enumerate_feasible_covers(
    h: Hierarchy, b: Budgets, guard: Optional[int] = None
) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Feasible sets with their minimum covers, in lexicographic member order.

    Args:
        h: Hierarchy
        b: Budgets
        guard: Maximum number of feasible sets (defaults to the configured guard)

    Returns:
        (ascending members, cover nodes) pairs

    Raises:
        TooLargeException: As soon as the guard is exceeded
    """
    limit = guard if guard is not None else _solver_config().enum_guard
    rows: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    for nodes in iter_feasible_covers(h, b):
        if len(rows) >= limit:
            logger.warning(f"Feasible set for {b} exceeds guard {limit} on {h!r}")
            raise TooLargeException(f"feasible set size for {b}", limit)
        rows.append((cover_members(h, nodes), nodes))
    rows.sort()
    return rows


def enumerate_feasible(
    h: Hierarchy, b: Budgets, guard: Optional[int] = None
) -> List[ClassSet]:
    """All non-empty Y with R(Y) <= r and |Y| <= k, sorted lexicographically.

    Raises:
        TooLargeException: If more than ``guard`` sets are feasible
    """
    return [frozenset(members) for members, _ in enumerate_feasible_covers(h, b, guard)]
