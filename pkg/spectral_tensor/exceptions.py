"""
Exception classes for spectral-tensor.
"""

from typing import Optional


class SpectralTensorError(Exception):
    """Base exception for spectral-tensor."""

    pass


class ConfigurationError(SpectralTensorError, ValueError):
    """Raised when configuration is invalid."""

    pass


class TensorError(SpectralTensorError):
    """Raised when a tensor or rotation value violates its invariants."""

    pass


class NotPositiveDefinite(TensorError):
    """Raised when a tensor has an eigenvalue at or below the positive-definiteness floor."""

    def __init__(
        self,
        message: str,
        eigenvalue: Optional[float] = None,
        voxel_index: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.voxel_index = voxel_index


class NonFinite(TensorError):
    """Raised when a tensor component is NaN or infinite."""

    pass


class NotARotation(TensorError):
    """Raised when a matrix is not a proper rotation."""

    pass


class IllConditioned(TensorError):
    """Raised when an intermediate solve exceeds the condition bound."""

    pass


class MeanError(SpectralTensorError):
    """Raised when a weighted mean cannot be computed."""

    pass


class DegenerateMean(MeanError):
    """Raised in strict mode when the orientation sum of a mean vanishes."""

    pass


class NoConvergence(MeanError):
    """Raised when the Karcher iteration exhausts its iteration budget."""

    pass


class InvalidWeights(MeanError, ValueError):
    """Raised when weights are negative, mismatched or do not sum to one."""

    pass


class UnsupportedMetric(SpectralTensorError, ValueError):
    """Raised when an operation does not support the requested metric."""

    pass


class OutOfRange(SpectralTensorError, ValueError):
    """Raised when an interpolation coordinate leaves the unit cell."""

    pass


class FieldFormatError(SpectralTensorError):
    """Raised when a tensor field file cannot be decoded."""

    pass


class BadMagic(FieldFormatError):
    """Raised when a field file does not start with a known header."""

    pass


class DimensionMismatch(FieldFormatError):
    """Raised when voxel counts disagree with the declared dimensions."""

    pass


class TruncatedFile(FieldFormatError):
    """Raised when a field file ends before all voxels are read."""

    pass


class VoxelError(SpectralTensorError):
    """Raised when processing a single voxel fails."""

    def __init__(self, voxel_index: int, cause: Exception) -> None:
        super().__init__(f"voxel {voxel_index}: {cause}")
        self.voxel_index = voxel_index
        self.cause = cause


class RankDeficient(SpectralTensorError):
    """Raised when Wishart sampling keeps producing singular draws."""

    pass
