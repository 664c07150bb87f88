"""
Tests for seeded random tensors.
"""

import numpy as np
import pytest

from spectral_tensor.exceptions import RankDeficient
from spectral_tensor.sampling import (
    make_rng,
    random_simplex_weights,
    random_spd,
    random_unit_quaternion,
    wishart_sample,
)
from spectral_tensor.tensor import DiffusionTensor


class TestWishartSample:
    """Test Wishart sampling."""

    def test_deterministic(self):
        """Test that a seed fixes the samples."""
        assert wishart_sample(42, 20) == wishart_sample(42, 20)
        assert wishart_sample(42, 20) != wishart_sample(43, 20)

    def test_prefix_is_stable(self):
        """Test that drawing more samples does not change the first ones."""
        assert wishart_sample(7, 50)[:10] == wishart_sample(7, 10)

    def test_sample_mean(self):
        """Test that the sample mean approaches dof·Σ."""
        scale = DiffusionTensor(2.0, 0.3, 0.0, 1.0, 0.1, 0.5)
        samples = wishart_sample(1, 10000, dof=5, scale=scale)
        mean = np.mean([s.as_matrix() for s in samples], axis=0)
        expected = 5.0 * scale.as_matrix()

        assert np.linalg.norm(mean - expected) <= 0.05 * np.linalg.norm(expected)

    def test_low_dof_rejected(self):
        """Test that fewer than 3 degrees of freedom are refused."""
        with pytest.raises(ValueError):
            wishart_sample(0, 5, dof=2)

    def test_rank_deficient_draws(self, monkeypatch):
        """Test that persistent singular draws raise after the redraw budget."""

        class ZeroGenerator:
            def standard_normal(self, size):
                return np.zeros(size)

        monkeypatch.setattr("spectral_tensor.sampling.make_rng", lambda seed: ZeroGenerator())

        with pytest.raises(RankDeficient):
            wishart_sample(0, 1)


class TestRandomHelpers:
    """Test the random tensor helpers."""

    def test_unit_quaternion(self):
        """Test that random quaternions have unit norm."""
        rng = make_rng(3)
        for _ in range(100):
            q = random_unit_quaternion(rng)
            assert np.linalg.norm(q.as_array()) == pytest.approx(1.0, abs=1e-12)

    def test_random_spd_range(self):
        """Test that eigenvalues stay in the requested range."""
        rng = make_rng(4)
        for _ in range(100):
            eigenvalues = random_spd(rng, 0.5, 5.0).eigenvalues()
            assert 0.5 - 1e-9 <= eigenvalues[2] <= eigenvalues[0] <= 5.0 + 1e-9

    def test_simplex_weights(self):
        """Test that weights are nonnegative and sum to one."""
        rng = make_rng(5)
        for n in (1, 2, 7):
            weights = random_simplex_weights(rng, n)
            assert len(weights) == n
            assert all(w >= 0.0 for w in weights)
            assert sum(weights) == pytest.approx(1.0, abs=1e-12)
