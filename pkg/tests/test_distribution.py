"""
Tests for dense distributions and divergences.
"""

import math

import numpy as np
import pytest

from boltzsynth.core.bitvector import BitVector
from boltzsynth.core.distribution import (
    DiscreteDistribution,
    floor_and_normalize,
    kl_divergence,
    normalize,
    total_variation,
)
from boltzsynth.systems.error_handling import (
    DegenerateDistributionError,
    DimensionError,
    NumericError,
)


class TestDiscreteDistribution:
    """Test cases for DiscreteDistribution."""

    def test_table_is_frozen_copy(self):
        source = np.array([0.5, 0.5])
        d = DiscreteDistribution(1, source)
        source[0] = 9.0
        assert d.probs[0] == 0.5
        with pytest.raises(ValueError):
            d.probs[0] = 1.0

    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            DiscreteDistribution(2, [0.5, 0.5])

    def test_rejects_negative_and_nan(self):
        with pytest.raises(NumericError):
            DiscreteDistribution(1, [1.5, -0.5])
        with pytest.raises(NumericError):
            DiscreteDistribution(1, [math.nan, 1.0])

    def test_uniform_and_point_mass(self):
        np.testing.assert_array_equal(DiscreteDistribution.uniform(2).probs, [0.25] * 4)
        np.testing.assert_array_equal(
            DiscreteDistribution.point_mass(2, 3).probs, [0, 0, 0, 1]
        )

    def test_from_weights(self):
        d = DiscreteDistribution.from_weights([1, 3])
        assert d.n == 1
        np.testing.assert_allclose(d.probs, [0.25, 0.75])

    def test_from_weights_needs_power_of_two(self):
        with pytest.raises(DimensionError):
            DiscreteDistribution.from_weights([1, 1, 1])

    def test_from_mapping(self):
        d = DiscreteDistribution.from_mapping(2, {0: 1.0, 3: 1.0})
        np.testing.assert_allclose(d.probs, [0.5, 0, 0, 0.5])

    def test_support_uses_epsilon(self):
        d = DiscreteDistribution(2, [0.5, 1e-13, 0.5 - 1e-13, 0.0])
        assert d.support() == (BitVector(2, 0), BitVector(2, 2))
        assert list(d.support_indices(epsilon=0.0)) == [0, 1, 2]

    def test_mass_accepts_index_or_vector(self):
        d = DiscreteDistribution(1, [0.25, 0.75])
        assert d.mass(1) == d.mass(BitVector(1, 1)) == 0.75

    def test_equality_and_hash(self):
        a = DiscreteDistribution(1, [0.25, 0.75])
        b = DiscreteDistribution(1, np.array([0.25, 0.75]))
        assert a == b
        assert hash(a) == hash(b)
        assert a != DiscreteDistribution(1, [0.75, 0.25])


class TestNormalize:
    """Test cases for normalize and floor_and_normalize."""

    def test_uniform(self):
        d = normalize(DiscreteDistribution(2, [1, 1, 1, 1]))
        np.testing.assert_array_equal(d.probs, [0.25] * 4)

    def test_point_mass(self):
        d = normalize(DiscreteDistribution(1, [2, 0]))
        np.testing.assert_array_equal(d.probs, [1.0, 0.0])

    def test_ratio(self):
        d = normalize(DiscreteDistribution(1, [1, 3]))
        np.testing.assert_array_equal(d.probs, [0.25, 0.75])

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateDistributionError):
            normalize(DiscreteDistribution(2, np.zeros(4)))

    def test_idempotent(self):
        d = normalize(DiscreteDistribution(2, [0.1, 0.7, 0.3, 0.9]))
        np.testing.assert_allclose(normalize(d).probs, d.probs, rtol=0, atol=1e-16)

    def test_floor(self):
        d = floor_and_normalize(DiscreteDistribution(1, [1.0, 0.0]), 1e-9)
        assert d.probs[1] > 0.0
        assert d.total() == pytest.approx(1.0, abs=1e-15)


class TestDivergences:
    """Test cases for KL divergence and total variation."""

    def test_kl_identity(self):
        u = DiscreteDistribution.uniform(2)
        assert kl_divergence(u, u) == 0.0

    def test_kl_single_term(self):
        p = DiscreteDistribution(1, [1.0, 0.0])
        q = DiscreteDistribution(1, [0.5, 0.5])
        assert kl_divergence(p, q) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_kl_support_violation(self):
        p = DiscreteDistribution(1, [0.5, 0.5])
        q = DiscreteDistribution(1, [1.0, 0.0])
        assert kl_divergence(p, q) == math.inf

    def test_kl_length_mismatch(self):
        with pytest.raises(DimensionError):
            kl_divergence(DiscreteDistribution.uniform(1), DiscreteDistribution.uniform(2))

    def test_kl_non_negative_random(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = DiscreteDistribution.from_weights(rng.random(16))
            q = DiscreteDistribution.from_weights(rng.random(16))
            assert kl_divergence(p, q) >= 0.0

    def test_tv_examples(self):
        p = DiscreteDistribution(1, [1.0, 0.0])
        q = DiscreteDistribution(1, [0.0, 1.0])
        assert total_variation(p, p) == 0.0
        assert total_variation(p, q) == 1.0
        assert total_variation(
            DiscreteDistribution(1, [0.25, 0.75]), DiscreteDistribution(1, [0.75, 0.25])
        ) == pytest.approx(0.5)

    def test_tv_length_mismatch(self):
        with pytest.raises(DimensionError):
            total_variation(
                DiscreteDistribution.uniform(1), DiscreteDistribution.uniform(2)
            )
