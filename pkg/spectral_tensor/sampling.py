"""
Seeded random tensors.
"""

import logging
from typing import List, Optional

import numpy as np

from .exceptions import RankDeficient, TensorError
from .tensor import DiffusionTensor, UnitQuaternion, quat_to_rotation

logger = logging.getLogger(__name__)

DEFAULT_DOF = 5
MAX_REDRAWS = 10
GENERATOR_NAME = "PCG64/ziggurat"


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; Gaussian draws use NumPy's ziggurat method."""
    return np.random.Generator(np.random.PCG64(seed))


def wishart_sample(
    seed: int,
    n: int,
    dof: int = DEFAULT_DOF,
    scale: Optional[DiffusionTensor] = None,
) -> List[DiffusionTensor]:
    """Draw ``n`` tensors Σ_j x_j x_jᵀ with x_j ~ N(0, scale), j = 1..dof.

    Draws that fail the positive-definiteness check are redrawn up to
    10 times before ``RankDeficient`` is raised.
    """
    if dof < 3:
        raise ValueError(f"dof must be at least 3 for full-rank samples, got {dof}")
    if n < 0:
        raise ValueError(f"sample count must be nonnegative, got {n}")
    chol = np.linalg.cholesky(scale.as_matrix()) if scale is not None else np.eye(3)
    rng = make_rng(seed)

    samples = []
    for index in range(n):
        for attempt in range(MAX_REDRAWS + 1):
            x = rng.standard_normal((dof, 3)) @ chol.T
            try:
                samples.append(DiffusionTensor.from_matrix(x.T @ x))
                break
            except TensorError as e:
                logger.warning(
                    "redrawing rank-deficient sample %d (attempt %d): %s", index, attempt, e
                )
        else:
            raise RankDeficient(f"sample {index} stayed rank-deficient after {MAX_REDRAWS} redraws")
    return samples


def random_unit_quaternion(rng: np.random.Generator) -> UnitQuaternion:
    """Uniformly distributed unit quaternion."""
    q = rng.standard_normal(4)
    return UnitQuaternion.from_array(q, normalize=True)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return quat_to_rotation(random_unit_quaternion(rng))


def random_spd(
    rng: np.random.Generator,
    low: float = 0.5,
    high: float = 5.0,
) -> DiffusionTensor:
    """Tensor with eigenvalues uniform in [low, high] and a uniform random frame."""
    eigenvalues = rng.uniform(low, high, size=3)
    u = random_rotation(rng)
    return DiffusionTensor.from_matrix((u * eigenvalues) @ u.T)


def random_simplex_weights(rng: np.random.Generator, n: int) -> List[float]:
    """Weights drawn uniformly from the simplex; the last one absorbs the rounding."""
    w = rng.exponential(size=n)
    w = w / w.sum()
    head = w[:-1].tolist()
    return head + [max(0.0, 1.0 - sum(head))]
