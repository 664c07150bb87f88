"""
Tests for tensor values, spectral forms and quaternion orbits.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_tensor.exceptions import (
    DimensionMismatch,
    NonFinite,
    NotARotation,
    NotPositiveDefinite,
    TensorError,
)
from spectral_tensor.tensor import (
    DiffusionTensor,
    SpectralForm,
    TensorField,
    UnitQuaternion,
    canonical_representative,
    compose,
    orbit,
    quat_to_rotation,
    rotation_to_quat,
    spectral_decompose,
    validate_spd,
)

finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
quaternion_arrays = st.tuples(finite, finite, finite, finite).filter(
    lambda q: sum(c * c for c in q) > 1e-3
)


def unit(q):
    return UnitQuaternion.from_array(q, normalize=True)


class TestDiffusionTensor:
    """Test the SPD tensor value type."""

    def test_validate_spd_accepts_identity(self):
        """Test that the identity is accepted."""
        t = validate_spd([1, 0, 0, 1, 0, 1])

        assert t == DiffusionTensor.identity()
        assert t.eigenvalues() == (1.0, 1.0, 1.0)

    def test_validate_spd_rejects_zero_eigenvalue(self):
        """Test that a singular tensor reports its smallest eigenvalue."""
        with pytest.raises(NotPositiveDefinite) as excinfo:
            validate_spd([1, 0, 0, 1, 0, 0])

        assert excinfo.value.eigenvalue == pytest.approx(0.0, abs=1e-15)

    def test_validate_spd_rejects_nan(self):
        """Test that NaN components are rejected."""
        with pytest.raises(NonFinite):
            validate_spd([1, 0, 0, float("nan"), 0, 1])

    def test_validate_spd_wrong_length(self):
        """Test that anything but six components is rejected."""
        with pytest.raises(TensorError):
            validate_spd([1, 0, 0, 1, 0])

    def test_from_matrix_symmetrizes(self):
        """Test that off-diagonal pairs are averaged."""
        m = np.array([[2.0, 0.2, 0.0], [0.4, 2.0, 0.0], [0.0, 0.0, 1.0]])

        assert DiffusionTensor.from_matrix(m).dxy == pytest.approx(0.3)

    def test_congruence_rotates(self, anisotropic, make_rotation):
        """Test that a rotation congruence keeps the eigenvalues."""
        rotated = anisotropic.congruence(make_rotation())

        assert rotated.eigenvalues() == pytest.approx(anisotropic.eigenvalues(), rel=1e-12)


class TestQuaternions:
    """Test unit quaternions and rotation conversion."""

    def test_norm_is_enforced(self):
        """Test that a non-unit quaternion is rejected."""
        with pytest.raises(TensorError):
            UnitQuaternion(1.0, 0.1, 0.0, 0.0)

    def test_identity_round_trip(self):
        """Test the identity rotation."""
        q = rotation_to_quat(np.eye(3))

        assert q.as_tuple() == pytest.approx((1.0, 0.0, 0.0, 0.0))

    def test_half_turn_uses_stable_branch(self):
        """Test a rotation by π, where sin θ vanishes."""
        r = np.diag([1.0, -1.0, -1.0])
        q = rotation_to_quat(r)

        assert abs(q.v1) == pytest.approx(1.0)
        np.testing.assert_allclose(quat_to_rotation(q), r, atol=1e-12)

    def test_reflection_is_not_a_rotation(self):
        """Test that det = -1 is rejected."""
        with pytest.raises(NotARotation):
            rotation_to_quat(np.diag([1.0, 1.0, -1.0]))

    def test_rotation_round_trip(self, make_rotation):
        """Test quat_to_rotation(rotation_to_quat(U)) == U for 1000 rotations."""
        for _ in range(1000):
            u = make_rotation()
            np.testing.assert_allclose(quat_to_rotation(rotation_to_quat(u)), u, atol=1e-12)

    @pytest.mark.parametrize(
        "low, high",
        [
            (math.pi - 3e-6, math.pi - 1e-6),
            (0.5 * math.pi - 1e-9, 0.5 * math.pi + 1e-9),
            (1e-7, 1e-5),
        ],
    )
    def test_round_trip_at_branch_boundaries(self, rng, low, high):
        """Test the round trip for angles near π, near π/2 and near zero."""
        for _ in range(5000):
            axis = rng.standard_normal(3)
            axis /= np.linalg.norm(axis)
            theta = float(rng.uniform(low, high))
            q = UnitQuaternion.from_array(
                [math.cos(0.5 * theta), *(math.sin(0.5 * theta) * axis)], normalize=True
            )
            r = quat_to_rotation(q)
            np.testing.assert_allclose(quat_to_rotation(rotation_to_quat(r)), r, atol=1e-9)

    def test_sign_invariance(self):
        """Test that q and -q give the same rotation exactly."""
        q = unit([0.3, -0.2, 0.5, 0.7])

        assert np.array_equal(quat_to_rotation(q), quat_to_rotation(-q))

    @settings(max_examples=200)
    @given(quaternion_arrays)
    def test_orbit_is_closed(self, q):
        """Test that the orbit of any member is the same set."""
        members = orbit(unit(q)).members
        reference = {m.as_tuple() for m in members}

        for m in members:
            assert {x.as_tuple() for x in orbit(m).members} == reference

    @settings(max_examples=200)
    @given(quaternion_arrays)
    def test_orbit_members_give_same_tensor(self, q):
        """Test that all orbit members rotate a tensor to the same matrix."""
        lam = np.array([3.0, 2.0, 1.0])
        base = quat_to_rotation(unit(q))
        expected = (base * lam) @ base.T

        for m in orbit(unit(q)).members:
            u = quat_to_rotation(m)
            np.testing.assert_allclose((u * lam) @ u.T, expected, atol=1e-12)

    @settings(max_examples=200)
    @given(quaternion_arrays)
    def test_canonical_is_orbit_invariant(self, q):
        """Test that every member canonicalizes to the same quaternion."""
        expected = canonical_representative(unit(q))

        for m in orbit(unit(q)).members:
            assert canonical_representative(m) == expected

    def test_canonical_has_no_negative_zero(self):
        """Test that canonical components never carry a negative zero."""
        c = canonical_representative(UnitQuaternion(1.0, 0.0, 0.0, 0.0))

        assert all(math.copysign(1.0, v) > 0 for v in c.as_tuple())


class TestSpectralDecompose:
    """Test spectral decomposition and composition."""

    def test_descending_eigenvalues(self, anisotropic):
        """Test the eigenvalue order."""
        f = spectral_decompose(anisotropic)

        assert f.eigenvalues == pytest.approx((3.0, 1.5, 0.5), rel=1e-12)

    def test_compose_round_trip(self, make_spd):
        """Test compose(spectral_decompose(S)) == S for 1000 tensors."""
        for _ in range(1000):
            s = make_spd()
            back = compose(spectral_decompose(s)).as_matrix()
            error = np.linalg.norm(back - s.as_matrix()) / np.linalg.norm(s.as_matrix())
            assert error < 1e-10

    def test_orientation_is_canonical(self, make_spd):
        """Test that the stored quaternion is the canonical representative."""
        f = spectral_decompose(make_spd())

        assert canonical_representative(f.q) == f.q

    def test_rotated_tensor_has_rotated_orientation(self, anisotropic, make_rotation):
        """Test that rotating a tensor rotates its principal axis."""
        r = make_rotation()
        axis = spectral_decompose(anisotropic).principal_axis()
        rotated_axis = spectral_decompose(anisotropic.congruence(r)).principal_axis()

        assert abs(float(np.dot(r @ axis, rotated_axis))) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_eigenvalues_are_accepted(self):
        """Test that an isotropic tensor still decomposes."""
        f = spectral_decompose(DiffusionTensor.identity().scaled(2.0))

        assert f.eigenvalues == pytest.approx((2.0, 2.0, 2.0))

    def test_spectral_form_rejects_unsorted(self):
        """Test the eigenvalue order invariant."""
        with pytest.raises(TensorError):
            SpectralForm((1.0, 2.0, 0.5), UnitQuaternion(1.0, 0.0, 0.0, 0.0))

    def test_determinant(self, anisotropic):
        """Test the determinant as a product of eigenvalues."""
        assert spectral_decompose(anisotropic).determinant() == pytest.approx(2.25, rel=1e-12)


class TestTensorField:
    """Test the tensor field container."""

    def test_index_is_x_fastest(self):
        """Test the voxel ordering."""
        field = TensorField.constant((3, 2, 2), DiffusionTensor.identity())

        assert field.index(1, 0, 0) == 1
        assert field.index(0, 1, 0) == 3
        assert field.index(0, 0, 1) == 6
        assert field.size == 12

    def test_voxel_count_must_match(self):
        """Test that dims and voxel count must agree."""
        with pytest.raises(DimensionMismatch):
            TensorField((2, 2, 1), (1.0, 1.0, 1.0), (DiffusionTensor.identity(),) * 3)

    def test_spacing_must_be_positive(self):
        """Test spacing validation."""
        with pytest.raises(DimensionMismatch):
            TensorField.constant((1, 1, 1), DiffusionTensor.identity(), spacing=(1.0, 0.0, 1.0))
