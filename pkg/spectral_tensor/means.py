"""
Weighted means of diffusion tensors.

The spectral-quaternion means average eigenvalues geometrically and
orientations as a chordal mean of realigned quaternions, so the Hilbert
anisotropy and the determinant of the mean are the weighted averages of
those of the inputs. Log-Euclidean and affine-invariant (Karcher) means are
provided as baselines.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .anisotropy import hilbert_anisotropy
from .exceptions import DegenerateMean, InvalidWeights, NoConvergence, UnsupportedMetric
from .linalg import expm, invsqrtm, logm, sqrtm, sym_apply, symmetrize
from .metrics import DEFAULT_K_PARAMS, KParams, MetricKind, k_factor, realign_array
from .tensor import (
    DiffusionTensor,
    SpectralForm,
    UnitQuaternion,
    canonical_array,
    compose,
    orbit_array,
    spectral_decompose,
)

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12
DEGENERATE_NORM = 1e-9
DEGENERATE_K_SUM = 1e-12
KARCHER_TOL = 1e-12
KARCHER_MAX_ITER = 100


@dataclass(frozen=True)
class WeightedTensorSet:
    """Tensors in spectral form with nonnegative weights summing to one."""

    tensors: Tuple[SpectralForm, ...]
    weights: Tuple[float, ...]

    def __post_init__(self) -> None:
        tensors = tuple(self.tensors)
        weights = tuple(float(w) for w in self.weights)
        if not tensors:
            raise InvalidWeights("a weighted set needs at least one tensor")
        if len(tensors) != len(weights):
            raise InvalidWeights(f"{len(tensors)} tensors but {len(weights)} weights")
        if not all(math.isfinite(w) and w >= 0.0 for w in weights):
            raise InvalidWeights(f"weights must be finite and nonnegative, got {weights}")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise InvalidWeights(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "tensors", tensors)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_tensors(
        cls,
        tensors: Sequence[DiffusionTensor],
        weights: Sequence[float],
    ) -> "WeightedTensorSet":
        return cls(tuple(spectral_decompose(t) for t in tensors), tuple(weights))

    @classmethod
    def uniform(cls, tensors: Sequence[DiffusionTensor]) -> "WeightedTensorSet":
        n = len(tensors)
        if n == 0:
            raise InvalidWeights("a weighted set needs at least one tensor")
        return cls.from_tensors(tensors, [1.0 / n] * n)

    def __len__(self) -> int:
        return len(self.tensors)

    def unit_weight_index(self) -> int:
        """Index of a weight exactly equal to 1, or -1."""
        for i, w in enumerate(self.weights):
            if w == 1.0:
                return i
        return -1


def _geometric_eigenvalues(
    forms: Sequence[SpectralForm], weights: Sequence[float]
) -> Tuple[Tuple[float, float, float], np.ndarray]:
    # fsum keeps the result independent of the input order
    logs = [f.log_eigenvalues() for f in forms]
    mean_log = np.array([math.fsum(w * l[j] for w, l in zip(weights, logs)) for j in range(3)])
    values = sorted(np.exp(mean_log).tolist(), reverse=True)
    return (values[0], values[1], values[2]), mean_log


def orientation_cost(
    q: np.ndarray, forms: Sequence[SpectralForm], weights: Sequence[float]
) -> float:
    """Σ w_i ‖q - q_i‖² with each q_i realigned to q."""
    q = np.asarray(q, dtype=float)
    cost = 0.0
    for f, w in zip(forms, weights):
        _, d = realign_array(q, orbit_array(f.q.as_array()))
        cost += w * d * d
    return cost


def _finish_orientation(
    total: np.ndarray,
    scale: float,
    fallback: np.ndarray,
    strict: bool,
) -> UnitQuaternion:
    norm = float(np.linalg.norm(total))
    if scale < DEGENERATE_K_SUM or norm / scale < DEGENERATE_NORM:
        if strict:
            raise DegenerateMean(f"orientation sum has norm {norm:.3g}")
        logger.warning("degenerate orientation sum (norm %.3g), using the reference", norm)
        return UnitQuaternion(*canonical_array(fallback).tolist())
    return UnitQuaternion(*canonical_array(total / norm).tolist())


def mean_pair(
    s1: SpectralForm,
    s2: SpectralForm,
    w1: float,
    w2: float,
    p: KParams = DEFAULT_K_PARAMS,
    strict: bool = False,
) -> SpectralForm:
    """Two-tensor spectral-quaternion mean.

    Eigenvalues are averaged geometrically and orientations by the chordal
    mean of q1 and q2 realigned to q1. Orientation weights do not include k,
    so ``p`` has no effect here; it is accepted for a uniform signature.
    """
    WeightedTensorSet((s1, s2), (w1, w2))  # validates the weights
    if w1 == 1.0:
        return s1
    if w2 == 1.0:
        return s2

    eigenvalues, _ = _geometric_eigenvalues((s1, s2), (w1, w2))
    q1 = s1.q.as_array()
    q2a, _ = realign_array(q1, orbit_array(s2.q.as_array()))
    total = w1 * q1 + w2 * q2a
    q = _finish_orientation(total, 1.0, q1, strict)
    return SpectralForm(eigenvalues, q)


def mean_n(
    tensor_set: WeightedTensorSet,
    p: KParams = DEFAULT_K_PARAMS,
    strict: bool = False,
) -> SpectralForm:
    """N-tensor spectral-quaternion mean.

    Each orientation is weighted by w_i·k_i with k_i = k(HA_i, HA_μ); HA_μ is
    read off the geometric-mean eigenvalues, which do not depend on the
    orientations. Quaternions are realigned to the reference tensor r
    maximizing w_r·k_r, ties broken by larger HA, then the greater canonical
    quaternion, then the larger determinant.
    """
    forms = tensor_set.tensors
    weights = tensor_set.weights
    unit = tensor_set.unit_weight_index()
    if unit >= 0:
        return forms[unit]

    eigenvalues, mean_log = _geometric_eigenvalues(forms, weights)
    ha_mu = float(mean_log[0] - mean_log[2])
    has = [hilbert_anisotropy(f.eigenvalues) for f in forms]
    ks = [k_factor(ha, ha_mu, p) for ha in has]

    r = max(
        range(len(forms)),
        key=lambda i: (weights[i] * ks[i], has[i], forms[i].q.as_tuple(), forms[i].determinant()),
    )
    q_ref = forms[r].q.as_array()
    logger.debug("mean of %d tensors: reference %d, HA_mu=%.6g", len(forms), r, ha_mu)

    aligned = [realign_array(q_ref, orbit_array(f.q.as_array()))[0] for f in forms]
    k_sum = math.fsum(ks)
    total = np.array(
        [math.fsum(w * k * q[c] for w, k, q in zip(weights, ks, aligned)) for c in range(4)]
    )
    q = _finish_orientation(total, k_sum, q_ref, strict)
    return SpectralForm(eigenvalues, q)


def mean_log_euclidean(tensor_set: WeightedTensorSet) -> DiffusionTensor:
    """exp(Σ w_i log S_i)."""
    unit = tensor_set.unit_weight_index()
    if unit >= 0:
        return compose(tensor_set.tensors[unit])

    acc = np.zeros((3, 3))
    for f, w in zip(tensor_set.tensors, tensor_set.weights):
        u = f.rotation()
        acc += w * ((u * f.log_eigenvalues()) @ u.T)
    return DiffusionTensor.from_matrix(expm(symmetrize(acc)))


def karcher_residual(tensor_set: WeightedTensorSet, s: DiffusionTensor) -> np.ndarray:
    """Σ w_i log(S^{-1/2} S_i S^{-1/2}); zero at the affine-invariant mean."""
    s_ihalf = invsqrtm(s.as_matrix())
    acc = np.zeros((3, 3))
    for f, w in zip(tensor_set.tensors, tensor_set.weights):
        if w == 0.0:
            continue
        acc += w * logm(symmetrize(s_ihalf @ f.matrix() @ s_ihalf))
    return symmetrize(acc)


def affine_invariant_geodesic(
    s1: DiffusionTensor, s2: DiffusionTensor, t: float
) -> DiffusionTensor:
    """S1^{1/2} (S1^{-1/2} S2 S1^{-1/2})^t S1^{1/2}."""
    a = s1.as_matrix()
    half, ihalf = sqrtm(a), invsqrtm(a)
    middle = sym_apply(symmetrize(ihalf @ s2.as_matrix() @ ihalf), lambda w: w**t)
    return DiffusionTensor.from_matrix(symmetrize(half @ middle @ half))


def mean_affine_invariant(
    tensor_set: WeightedTensorSet,
    tol: float = KARCHER_TOL,
    max_iter: int = KARCHER_MAX_ITER,
) -> DiffusionTensor:
    """Karcher mean under the affine-invariant metric.

    Two tensors with nonzero weight have the geodesic point as their exact
    mean. Larger sets use the fixed-point iteration S <- S^{1/2} exp(T) S^{1/2}
    with T the log-residual, started at the Log-Euclidean mean and stopped
    once ‖T‖_F < tol.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    unit = tensor_set.unit_weight_index()
    if unit >= 0:
        return compose(tensor_set.tensors[unit])

    used = [(f, w) for f, w in zip(tensor_set.tensors, tensor_set.weights) if w > 0.0]
    if len(used) == 2:
        (f1, _), (f2, w2) = used
        return affine_invariant_geodesic(compose(f1), compose(f2), w2)

    s = mean_log_euclidean(tensor_set)
    for iteration in range(max_iter):
        residual = karcher_residual(tensor_set, s)
        norm = float(np.linalg.norm(residual))
        logger.debug("karcher iteration %d: residual %.3e", iteration, norm)
        if norm < tol:
            return s
        s_half = sqrtm(s.as_matrix())
        s = DiffusionTensor.from_matrix(symmetrize(s_half @ expm(residual) @ s_half))
    raise NoConvergence(f"no convergence to {tol:.3g} within {max_iter} iterations")


def weighted_mean(
    kind: MetricKind,
    tensor_set: WeightedTensorSet,
    p: KParams = DEFAULT_K_PARAMS,
) -> DiffusionTensor:
    """Mean under the framework named by ``kind``.

    Spectral-quaternion means of exactly two tensors use the two-tensor
    formula; larger sets use the k-weighted N-tensor formula.
    """
    kind = MetricKind(kind)
    if kind is MetricKind.SPECTRAL_QUATERNION:
        if len(tensor_set) == 2:
            (s1, s2), (w1, w2) = tensor_set.tensors, tensor_set.weights
            return compose(mean_pair(s1, s2, w1, w2, p))
        return compose(mean_n(tensor_set, p))
    if kind is MetricKind.LOG_EUCLIDEAN:
        return mean_log_euclidean(tensor_set)
    if kind is MetricKind.AFFINE_INVARIANT:
        return mean_affine_invariant(tensor_set)
    raise UnsupportedMetric(f"no weighted mean is defined for metric {kind.value!r}")
