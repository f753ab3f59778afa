"""Tests for flat and hierarchical distributions."""

import numpy as np
import pytest

from hsvp.core.errors import DimensionMismatchException, InvalidDistributionException
from hsvp.core.prob import (
    FlatDistribution,
    HierarchicalDistribution,
    ProblemInstance,
    all_node_masses,
    flat_to_hier,
    hier_to_flat,
    node_mass_chain,
    set_mass,
    top_down_masses,
    top_k_mass,
)


class TestFlatDistribution:
    """Test validation of flat distributions."""

    def test_valid(self, example_probs):
        assert example_probs.class_count == 4
        assert not example_probs.probs.flags.writeable

    def test_small_error_is_renormalized(self):
        d = FlatDistribution([0.5, 0.1, 0.3, 0.1 + 5e-7])
        assert d.probs.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize(
        "probs",
        [
            [0.5, 0.6],
            [1.5, -0.5],
            [0.5, float("nan"), 0.5],
            [0.5, 0.4],
            [],
        ],
    )
    def test_invalid(self, probs):
        with pytest.raises(InvalidDistributionException):
            FlatDistribution(probs)


class TestSetMass:
    """Test set masses."""

    def test_example(self, example_probs):
        assert set_mass(example_probs, {0, 2}) == pytest.approx(0.8)

    def test_full_set(self, example_probs):
        assert set_mass(example_probs, range(4)) == pytest.approx(1.0, abs=1e-9)

    def test_empty_set(self, example_probs):
        assert set_mass(example_probs, set()) == 0.0

    def test_top_k_mass(self, example_probs):
        assert top_k_mass(example_probs, 2) == pytest.approx(0.8)
        assert top_k_mass(example_probs, 4) == pytest.approx(1.0)


class TestNodeMasses:
    """Test node masses and the chain rule."""

    def test_all_node_masses(self, example_tree, example_probs):
        masses = all_node_masses(example_tree, example_probs)
        expected = [1.0, 0.6, 0.4, 0.5, 0.1, 0.3, 0.1]
        for v, value in zip(range(1, 8), expected):
            assert masses[v] == pytest.approx(value)

    def test_uniform(self, example_tree):
        masses = all_node_masses(example_tree, FlatDistribution([0.25] * 4))
        assert masses[2] == pytest.approx(0.5)
        assert masses[3] == pytest.approx(0.5)

    def test_point_mass(self, example_tree):
        masses = all_node_masses(example_tree, FlatDistribution([1.0, 0.0, 0.0, 0.0]))
        assert masses[4] == masses[2] == 1.0
        assert masses[3] == masses[5] == masses[6] == masses[7] == 0.0

    def test_dimension_mismatch(self, example_tree):
        with pytest.raises(DimensionMismatchException):
            all_node_masses(example_tree, FlatDistribution([0.5, 0.5]))

    def test_chain_rule(self, example_tree, example_probs):
        d = flat_to_hier(example_tree, example_probs)
        assert node_mass_chain(example_tree, d, 1) == 1.0
        assert node_mass_chain(example_tree, d, 4) == pytest.approx(0.6 * 5 / 6)
        assert node_mass_chain(example_tree, d, 6) == pytest.approx(0.4 * 0.75)


class TestConversions:
    """Test flat to hierarchical conversion and back."""

    def test_example_conditionals(self, example_tree, example_probs):
        d = flat_to_hier(example_tree, example_probs)
        assert d.child_cond[1][0] == pytest.approx(0.6)
        assert d.child_cond[2][0] == pytest.approx(5 / 6)
        assert d.child_cond[3][1] == pytest.approx(0.25)

    def test_uniform_conditionals(self, example_tree):
        d = flat_to_hier(example_tree, FlatDistribution([0.25] * 4))
        for conds in d.child_cond.values():
            assert list(conds) == pytest.approx([0.5, 0.5])

    def test_zero_mass_parent_gets_uniform(self, example_tree):
        d = flat_to_hier(example_tree, FlatDistribution([1.0, 0.0, 0.0, 0.0]))
        assert d.child_cond[1][0] == 1.0
        assert d.child_cond[3][0] == 0.5

    def test_uniform_conditionals_to_flat(self, example_tree):
        d = HierarchicalDistribution(example_tree, {1: [0.5, 0.5], 2: [0.5, 0.5], 3: [0.5, 0.5]})
        assert list(hier_to_flat(example_tree, d).probs) == pytest.approx([0.25] * 4)

    def test_chain_products(self, example_tree):
        d = HierarchicalDistribution(example_tree, {1: [1.0, 0.0], 2: [0.5, 0.5], 3: [0.5, 0.5]})
        assert list(hier_to_flat(example_tree, d).probs) == pytest.approx([0.5, 0.5, 0.0, 0.0])

    def test_round_trip_and_conservation(self, random_problem):
        """Conversions are inverse and children conserve their parent's mass."""
        for seed in range(200):
            h, p = random_problem(seed, 2, 12)
            d = flat_to_hier(h, p)
            back = hier_to_flat(h, d)
            np.testing.assert_allclose(back.probs, p.probs, rtol=0, atol=1e-12)

            masses = top_down_masses(h, d)
            for v in h.internal_nodes:
                total = sum(masses[c] for c in h.children_of[v])
                assert abs(total - masses[v]) <= 1e-12
            flat_masses = all_node_masses(h, p)
            for v in h.node_ids:
                assert abs(flat_masses[v] - masses[v]) <= 1e-12

    def test_conditionals_keyed_by_internal_nodes(self, example_tree):
        with pytest.raises(InvalidDistributionException):
            HierarchicalDistribution(example_tree, {1: [0.5, 0.5], 2: [0.5, 0.5]})
        with pytest.raises(InvalidDistributionException):
            HierarchicalDistribution(
                example_tree, {1: [0.5, 0.5], 2: [0.5, 0.5], 3: [0.5, 0.5], 4: [1.0]}
            )

    def test_conditionals_aligned_with_children(self, example_tree):
        with pytest.raises(InvalidDistributionException):
            HierarchicalDistribution(example_tree, {1: [1.0], 2: [0.5, 0.5], 3: [0.5, 0.5]})


class TestProblemInstance:
    """Test instances holding either distribution form."""

    def test_requires_a_distribution(self):
        with pytest.raises(InvalidDistributionException):
            ProblemInstance("0")

    def test_converts_on_demand(self, example_tree, example_probs):
        inst = ProblemInstance("a", flat=example_probs, y_true=2)
        hier = inst.as_hier(example_tree)
        assert hier.child_cond[1][0] == pytest.approx(0.6)
        assert inst.as_flat(example_tree) is example_probs

        other = ProblemInstance("b", hier=hier)
        assert list(other.as_flat(example_tree).probs) == pytest.approx(list(example_probs.probs))
