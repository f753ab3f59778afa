"""Exception hierarchy shared by the core, solvers and CLI."""

from typing import Optional


class HsvpException(Exception):
    """Base class for all hsvp errors."""

    pass


class InvalidHierarchyException(HsvpException):
    """Raised when an edge list does not describe a valid class hierarchy."""

    pass


class CycleDetectedException(InvalidHierarchyException):
    """Raised when a node is its own ancestor."""

    def __init__(self, node: int):
        """Initialize exception.

        Args:
            node: A node lying on (or below) the cycle
        """
        self.node = node
        super().__init__(f"Cycle detected: node {node} is not reachable from a root")


class MultipleRootsException(InvalidHierarchyException):
    """Raised when more than one node has the root sentinel as parent."""

    def __init__(self, roots: list[int]):
        self.roots = roots
        super().__init__(f"Hierarchy must have exactly one root, found {roots}")


class UnaryInternalNodeException(InvalidHierarchyException):
    """Raised when an internal node has a single child."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(f"Internal node {node} has a single child")


class UnknownParentException(InvalidHierarchyException):
    """Raised when an edge names a parent that is not a node."""

    def __init__(self, child: int, parent: int):
        self.child = child
        self.parent = parent
        super().__init__(f"Node {child} has unknown parent {parent}")


class DuplicateNodeException(InvalidHierarchyException):
    """Raised when a node id is declared twice."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(f"Node {node} is declared more than once")


class EmptySetException(HsvpException):
    """Raised when an operation is undefined for the empty class set."""

    def __init__(self, operation: str):
        self.operation = operation
        super().__init__(f"{operation} is undefined for the empty set")


class ClassIndexException(HsvpException):
    """Raised when a class index is outside [0, K)."""

    def __init__(self, index: int, class_count: int):
        self.index = index
        self.class_count = class_count
        super().__init__(f"Class index {index} outside [0, {class_count})")


class UnknownNodeException(HsvpException):
    """Raised when a node id is not part of the hierarchy."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(f"Unknown node: {node}")


class TooLargeException(HsvpException):
    """Raised when an exhaustive computation would exceed its size guard."""

    def __init__(self, what: str, limit: int, actual: Optional[int] = None):
        """Initialize exception.

        Args:
            what: Description of the quantity that exceeded the guard
            limit: Configured limit
            actual: Observed size, when known
        """
        self.what = what
        self.limit = limit
        self.actual = actual
        detail = f" (got {actual})" if actual is not None else ""
        super().__init__(f"{what} exceeds limit {limit}{detail}")


class InvalidDistributionException(HsvpException):
    """Raised when probabilities are out of range or do not normalize."""

    pass


class DimensionMismatchException(HsvpException):
    """Raised when a distribution does not match the class count."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Expected {expected} classes, got {actual}")


class InfeasibleBudgetException(HsvpException):
    """Raised when no non-empty set satisfies the budgets."""

    pass


class LengthMismatchException(HsvpException):
    """Raised when predictions and ground truths differ in length."""

    def __init__(self, predictions: int, truths: int):
        self.predictions = predictions
        self.truths = truths
        super().__init__(f"{predictions} predictions but {truths} ground truths")


class EmptyBatchException(HsvpException):
    """Raised when a batch holds no instances."""

    pass


class InputFormatException(HsvpException):
    """Raised when an input file cannot be parsed."""

    def __init__(self, path: str, line: Optional[int], message: str):
        """Initialize exception.

        Args:
            path: Offending file
            line: 1-based line number, or None for whole-file problems
            message: What is wrong
        """
        self.path = path
        self.line = line
        self.message = message
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}")
