"""
Distances and similarity measures between diffusion tensors.

Four measures are provided: the affine-invariant Riemannian distance, the
Log-Euclidean distance, and two spectral measures that compare eigenvalues and
orientations separately. The spectral measures weight the orientation term by
``k_factor``, which vanishes when either tensor is isotropic.
"""

import logging
import math
from enum import Enum
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from .anisotropy import hilbert_anisotropy
from .exceptions import IllConditioned, UnsupportedMetric
from .linalg import logm
from .tensor import (
    DiffusionTensor,
    QuaternionOrbit,
    SpectralForm,
    UnitQuaternion,
    orbit,
    orbit_array,
    spectral_decompose,
)

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12

# Identity and the π-rotations about the frame axes.
FRAME_FLIPS = (
    np.eye(3),
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)


class MetricKind(str, Enum):
    """Selectable inter-tensor measures, valued by their CLI flag."""

    AFFINE_INVARIANT = "ai"
    LOG_EUCLIDEAN = "le"
    SPECTRAL_ROTATION = "spectral-rot"
    SPECTRAL_QUATERNION = "sq"


class KParams(BaseModel):
    """Constants of k = (1 + tanh(slope·HA1·HA2 - offset)) / 2."""

    model_config = ConfigDict(frozen=True)

    slope: float = Field(3.0, gt=0, description="Gain on the product of anisotropies")
    offset: float = Field(7.0, ge=0, description="Shift of the tanh transition")


DEFAULT_K_PARAMS = KParams()


def _eigen_term(l1: Sequence[float], l2: Sequence[float]) -> float:
    return sum((math.log(a) - math.log(b)) ** 2 for a, b in zip(l1, l2))


def dist_eigenvalues(l1: Sequence[float], l2: Sequence[float]) -> float:
    """sqrt(Σ log²(λ1,i / λ2,i)) between two descending eigenvalue triples."""
    return math.sqrt(_eigen_term(l1, l2))


def k_factor(ha1: float, ha2: float, p: KParams = DEFAULT_K_PARAMS) -> float:
    """Orientation weight, ~0 when either tensor is isotropic and -> 1 when both are anisotropic."""
    if ha1 < 0.0 or ha2 < 0.0:
        raise ValueError(f"anisotropies must be nonnegative, got {ha1}, {ha2}")
    return 0.5 * (1.0 + math.tanh(p.slope * ha1 * ha2 - p.offset))


def realign_array(q_ref: np.ndarray, members: np.ndarray) -> Tuple[np.ndarray, float]:
    best = members[int(np.argmax(members @ q_ref))]
    return best, float(np.linalg.norm(q_ref - best))


def realign(q_ref: UnitQuaternion, orbit2: QuaternionOrbit) -> Tuple[UnitQuaternion, float]:
    """Orbit member with the largest dot product with ``q_ref`` and its chordal distance.

    ‖q_ref - m‖² = 2 - 2 q_ref·m, so the member maximizing the dot product is
    the closest one.
    """
    best, d = realign_array(q_ref.as_array(), orbit2.as_array())
    return UnitQuaternion(*best.tolist()), d


def orientation_distance(q1: UnitQuaternion, q2: UnitQuaternion) -> float:
    """Chordal distance between two tensor orientations given any representatives."""
    return realign(q1, orbit(q2))[1]


def dist_spectral_quaternion(
    s1: SpectralForm,
    s2: SpectralForm,
    p: KParams = DEFAULT_K_PARAMS,
) -> float:
    """Spectral-quaternion measure: d² = k·‖q1 - q2ᵃ‖² + Σ log²(λ1,i / λ2,i)."""
    k = k_factor(hilbert_anisotropy(s1.eigenvalues), hilbert_anisotropy(s2.eigenvalues), p)
    _, chord = realign_array(s1.q.as_array(), orbit_array(s2.q.as_array()))
    return math.sqrt(k * chord * chord + _eigen_term(s1.eigenvalues, s2.eigenvalues))


def dist_log_euclidean(s1: DiffusionTensor, s2: DiffusionTensor) -> float:
    """‖log S1 - log S2‖_F."""
    return float(np.linalg.norm(logm(s1.as_matrix()) - logm(s2.as_matrix())))


def dist_affine_invariant(
    s1: DiffusionTensor,
    s2: DiffusionTensor,
    max_condition: float = MAX_CONDITION,
) -> float:
    """‖log(S1^{-1/2} S2 S1^{-1/2})‖_F.

    The spectrum of S1^{-1/2} S2 S1^{-1/2} is that of the generalized problem
    S2 v = μ S1 v, solved through the Cholesky factor of S1.
    """
    a = s1.as_matrix()
    cond = float(np.linalg.cond(a))
    if cond > max_condition:
        raise IllConditioned(f"condition number {cond:.3g} exceeds {max_condition:.3g}")
    mu = scipy.linalg.eigvalsh(s2.as_matrix(), a)
    return float(np.sqrt(np.sum(np.log(mu) ** 2)))


def rotation_distance(u1: np.ndarray, u2: np.ndarray) -> float:
    """Geodesic distance between two frames, minimized over the 4 representatives of U2.

    ‖log(U1ᵀ U2 g)‖_F = √2·θ for a relative rotation angle θ; the value
    returned is θ/2, the arc length between the corresponding unit
    quaternions, which puts it on the scale of the chordal distance.
    """
    norms = [np.linalg.norm(scipy.linalg.logm(u1.T @ (u2 @ g))) for g in FRAME_FLIPS]
    return float(min(norms)) / (2.0 * math.sqrt(2.0))


def dist_spectral_rotation(
    s1: DiffusionTensor,
    s2: DiffusionTensor,
    p: KParams = DEFAULT_K_PARAMS,
) -> float:
    """Spectral measure with the orientation term taken on rotation matrices.

    Slow baseline for the quaternion measure: four matrix logarithms per call.
    """
    f1 = spectral_decompose(s1)
    f2 = spectral_decompose(s2)
    k = k_factor(hilbert_anisotropy(f1.eigenvalues), hilbert_anisotropy(f2.eigenvalues), p)
    d_rot = rotation_distance(f1.rotation(), f2.rotation())
    return math.sqrt(k * d_rot * d_rot + _eigen_term(f1.eigenvalues, f2.eigenvalues))


def distance(
    kind: MetricKind,
    s1: DiffusionTensor,
    s2: DiffusionTensor,
    p: KParams = DEFAULT_K_PARAMS,
) -> float:
    """Dispatch to the measure named by ``kind``."""
    kind = MetricKind(kind)
    if kind is MetricKind.AFFINE_INVARIANT:
        return dist_affine_invariant(s1, s2)
    if kind is MetricKind.LOG_EUCLIDEAN:
        return dist_log_euclidean(s1, s2)
    if kind is MetricKind.SPECTRAL_ROTATION:
        return dist_spectral_rotation(s1, s2, p)
    if kind is MetricKind.SPECTRAL_QUATERNION:
        return dist_spectral_quaternion(spectral_decompose(s1), spectral_decompose(s2), p)
    raise UnsupportedMetric(f"unknown metric {kind!r}")
