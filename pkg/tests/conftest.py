"""Shared fixtures: the four-class example tree, its reference distribution,
and seeded random problems."""

import logging
from typing import Callable, Tuple

import numpy as np
import pytest

from hsvp.config.settings import reset_config
from hsvp.core.generate import random_hierarchy
from hsvp.core.hierarchy import Hierarchy, build_hierarchy
from hsvp.core.prob import FlatDistribution

# v1 is the root, v2 and v3 its children, v4..v7 the leaves (classes 0..3)
EXAMPLE_EDGES = [(1, 0), (2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 3)]
EXAMPLE_PROBS = [0.5, 0.1, 0.3, 0.1]

EXAMPLE_HIERARCHY_TSV = "".join(f"{child}\t{parent}\tv{child}\n" for child, parent in EXAMPLE_EDGES)


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    """Isolate tests from HSVP_* variables, loaded configuration and CLI logging."""
    for name in ("HSVP_CONFIG", "HSVP_ENUM_GUARD", "HSVP_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    reset_config()
    # stderr handlers installed by main() would outlive the captured stream
    for handler in list(root.handlers):
        if handler not in handlers and type(handler) is logging.StreamHandler:
            root.removeHandler(handler)
    root.setLevel(level)


@pytest.fixture
def example_tree() -> Hierarchy:
    """Four classes under two binary subtrees."""
    return build_hierarchy(EXAMPLE_EDGES)


@pytest.fixture
def example_probs() -> FlatDistribution:
    return FlatDistribution(EXAMPLE_PROBS)


@pytest.fixture
def random_problem() -> Callable[[int, int, int], Tuple[Hierarchy, FlatDistribution]]:
    """Factory of a seeded random hierarchy with K in [lo, hi] and a Dirichlet(1) row."""

    def make(seed: int, lo: int = 3, hi: int = 8) -> Tuple[Hierarchy, FlatDistribution]:
        rng = np.random.default_rng(seed)
        class_count = int(rng.integers(lo, hi + 1))
        branching = float(rng.choice([2.0, 2.5, 3.0]))
        h = random_hierarchy(class_count, branching, rng)
        return h, FlatDistribution(rng.dirichlet(np.ones(class_count)))

    return make
