"""Tests for the exhaustive oracle, batch evaluation and timing."""

import time

import numpy as np
import pytest

from hsvp.core.errors import (
    DimensionMismatchException,
    EmptyBatchException,
    LengthMismatchException,
    TooLargeException,
)
from hsvp.core.generate import random_hierarchy
from hsvp.core.prob import FlatDistribution
from hsvp.eval.metrics import evaluate
from hsvp.eval.oracle import oracle_solve
from hsvp.eval.timing import Stopwatch, measure
from hsvp.models import Budgets, Prediction


def _prediction(classes, n=10, time_us=2.0, r=2, k=2):
    return Prediction(
        solver="rts",
        budgets=Budgets(r=r, k=k),
        classes=frozenset(classes),
        mass=0.5,
        n=n,
        time_us=time_us,
    )


class TestOracle:
    """Test exhaustive search."""

    @pytest.mark.parametrize(
        "r, k, mass, classes",
        [
            (2, 2, 0.8, {0, 2}),
            (1, 2, 0.6, {0, 1}),
            (1, 4, 1.0, {0, 1, 2, 3}),
            (1, 1, 0.5, {0}),
            (2, 3, 0.9, {0, 1, 2}),
        ],
    )
    def test_example(self, example_tree, example_probs, r, k, mass, classes):
        prediction = oracle_solve(example_tree, example_probs, Budgets(r=r, k=k))
        assert prediction.mass == pytest.approx(mass, abs=1e-12)
        assert prediction.classes == frozenset(classes)
        assert prediction.n == 15

    def test_reports_cover(self, example_tree, example_probs):
        prediction = oracle_solve(example_tree, example_probs, Budgets(r=2, k=2))
        assert prediction.nodes == (4, 6)

    def test_tie_goes_to_smallest_member_list(self, example_tree):
        d = FlatDistribution([0.5, 0.125, 0.25, 0.125])
        prediction = oracle_solve(example_tree, d, Budgets(r=2, k=3))
        assert prediction.mass == 0.875
        assert prediction.classes == frozenset({0, 1, 2})

    def test_class_limit(self, example_tree, example_probs):
        with pytest.raises(TooLargeException):
            oracle_solve(example_tree, example_probs, Budgets(r=1, k=1), max_classes=3)

    def test_dimension_mismatch(self, example_tree):
        with pytest.raises(DimensionMismatchException):
            oracle_solve(example_tree, FlatDistribution([0.5, 0.5]), Budgets(r=1, k=1))


class TestEvaluate:
    """Test aggregation of one solver cell."""

    def test_recall_and_size(self):
        row = evaluate([_prediction({0, 1}), _prediction({2})], [0, 3])
        assert row.recall == 0.5
        assert row.avg_set_size == 1.5
        assert row.avg_n == 10.0
        assert row.avg_time_us == 2.0
        assert row.instances == 2
        assert (row.solver, row.r, row.k) == ("rts", 2, 2)

    def test_unlabeled_instances_are_skipped(self):
        row = evaluate([_prediction({0}), _prediction({1})], [0, -1])
        assert row.recall == 1.0
        assert row.avg_set_size == 1.0

    def test_no_labels(self):
        assert evaluate([_prediction({0})], [-1]).recall is None

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchException):
            evaluate([_prediction({0})], [0, 1])

    def test_empty_batch(self):
        with pytest.raises(EmptyBatchException):
            evaluate([], [])


class TestRecallAcrossBudgets:
    """Recall on hard labels against the expected recall under the distribution."""

    def test_recall_can_drop_when_k_grows(self, example_tree):
        """At k=2 the heavier subtree {2,3} displaces the most likely class."""
        d = FlatDistribution([0.4, 0.05, 0.3, 0.25])
        narrow = oracle_solve(example_tree, d, Budgets(r=1, k=1))
        wide = oracle_solve(example_tree, d, Budgets(r=1, k=2))
        assert narrow.classes == frozenset({0})
        assert wide.classes == frozenset({2, 3})
        assert wide.mass > narrow.mass
        assert evaluate([narrow], [0]).recall == 1.0
        assert evaluate([wide], [0]).recall == 0.0

    def test_expected_recall_is_non_decreasing(self):
        """Each class is labeled as often as its integer weight, so recall equals set mass."""
        for seed in range(15):
            rng = np.random.default_rng(seed)
            class_count = int(rng.integers(3, 9))
            h = random_hierarchy(class_count, float(rng.choice([2.0, 2.5, 3.0])), rng)
            weights = rng.integers(1, 6, class_count)
            d = FlatDistribution(weights / weights.sum())
            truths = [c for c in range(class_count) for _ in range(int(weights[c]))]

            recall = {}
            for r in range(1, 5):
                for k in range(1, 5):
                    prediction = oracle_solve(h, d, Budgets(r=r, k=k))
                    recall[r, k] = evaluate([prediction] * len(truths), truths).recall
                    assert recall[r, k] == pytest.approx(prediction.mass, abs=1e-12)
            for r in range(1, 5):
                for k in range(1, 4):
                    assert recall[r, k + 1] >= recall[r, k], (seed, r, k)
                    assert recall[k + 1, r] >= recall[k, r], (seed, k, r)


class TestTiming:
    """Test the stopwatch."""

    def test_stopwatch_measures_sleep(self):
        with Stopwatch() as watch:
            time.sleep(0.002)
        assert watch.elapsed_us >= 2000.0
        frozen = watch.elapsed_us
        time.sleep(0.001)
        assert watch.elapsed_us == frozen

    def test_measure_runs_warmup_untimed(self):
        calls = []
        result, elapsed = measure(lambda: calls.append(1) or len(calls), warmup=3)
        assert result == 4
        assert len(calls) == 4
        assert elapsed >= 0.0
