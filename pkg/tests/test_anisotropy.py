"""
Tests for anisotropy indices.
"""

import math

import pytest

from spectral_tensor.anisotropy import (
    AnisoIndexKind,
    all_indices,
    aniso_sweep,
    classical_index,
    hilbert_anisotropy,
)


class TestIndices:
    """Test single-tensor anisotropy indices."""

    def test_isotropic_is_zero(self):
        """Test that every index vanishes on a sphere."""
        assert all_indices((2.0, 2.0, 2.0)) == {"HA": 0.0, "FA": 0.0, "RA": 0.0, "GA": 0.0}

    def test_hilbert_anisotropy(self):
        """Test HA = log(λmax/λmin)."""
        assert hilbert_anisotropy((4.0, 2.0, 0.5)) == pytest.approx(math.log(8.0))

    def test_geodesic_anisotropy(self):
        """Test GA on a log-symmetric triple."""
        assert classical_index(AnisoIndexKind.GA, (math.e, 1.0, 1.0 / math.e)) == pytest.approx(
            math.sqrt(2.0)
        )

    def test_inputs_are_sorted(self):
        """Test that eigenvalue order does not matter."""
        assert classical_index("HA", (1.0, 3.0, 2.0)) == pytest.approx(math.log(3.0))
        assert classical_index("FA", (1.0, 3.0, 2.0)) == classical_index("FA", (3.0, 2.0, 1.0))

    def test_rank_deficient(self):
        """Test the limits on a single-direction tensor."""
        values = all_indices((1.0, 0.0, 0.0))

        assert values["HA"] == math.inf
        assert values["GA"] == math.inf
        assert values["FA"] == pytest.approx(1.0)
        assert values["RA"] == pytest.approx(math.sqrt(2.0))

    def test_negative_eigenvalue(self):
        """Test that negative eigenvalues are rejected."""
        with pytest.raises(ValueError):
            classical_index("FA", (1.0, 0.5, -0.1))

        with pytest.raises(ValueError):
            hilbert_anisotropy((1.0, 0.5, -0.1))


class TestAnisoSweep:
    """Test the planar-to-linear sweep."""

    def test_row_count_and_range(self):
        """Test the sampled t values."""
        rows = aniso_sweep(100)

        assert len(rows) == 100
        assert rows[0].t == pytest.approx(1e-3)
        assert rows[-1].t == 1.0

    def test_spherical_point(self):
        """Test that the sweep hits t = 1/3, where every index vanishes."""
        for steps in (3, 100, 1000):
            rows = aniso_sweep(steps)
            spherical = [r for r in rows if r.t == 1.0 / 3.0]

            assert len(rows) == steps
            assert len(spherical) == 1
            for value in spherical[0][1:]:
                assert value == pytest.approx(0.0, abs=1e-12)

    def test_t_stays_increasing(self):
        """Test that moving a sample onto 1/3 keeps t strictly increasing."""
        for steps in (3, 4, 7, 100, 1000):
            ts = [r.t for r in aniso_sweep(steps)]
            assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_hilbert_anisotropy_increases_towards_linear(self):
        """Test that HA grows monotonically on [1/3, 1]."""
        rows = [r for r in aniso_sweep(500) if r.t >= 1.0 / 3.0]
        values = [r.HA for r in rows]

        assert all(b > a for a, b in zip(values, values[1:]))

    def test_endpoint_limits(self):
        """Test the rank-deficient endpoint."""
        last = aniso_sweep(10)[-1]

        assert last.HA == math.inf
        assert last.GA == math.inf
        assert last.FA == pytest.approx(1.0)

    def test_too_few_steps(self):
        """Test the step count check."""
        with pytest.raises(ValueError):
            aniso_sweep(1)
