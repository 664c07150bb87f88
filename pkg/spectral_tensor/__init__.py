"""
spectral-tensor - diffusion tensor distances, means and interpolation with spectral quaternions.
"""

__version__ = "0.1.0"
__description__ = "Spectral-quaternion framework for diffusion tensor processing"

from .config import Config
from .exceptions import SpectralTensorError
from .means import WeightedTensorSet, mean_n, mean_pair, weighted_mean
from .metrics import KParams, MetricKind, distance
from .tensor import DiffusionTensor, SpectralForm, TensorField, UnitQuaternion, spectral_decompose

__all__ = [
    "Config",
    "DiffusionTensor",
    "KParams",
    "MetricKind",
    "SpectralForm",
    "SpectralTensorError",
    "TensorField",
    "UnitQuaternion",
    "WeightedTensorSet",
    "distance",
    "mean_n",
    "mean_pair",
    "spectral_decompose",
    "weighted_mean",
]
