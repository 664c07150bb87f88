"""
Distance benchmark, similarity-measure sweeps and the crossed-cigar configuration.
"""

import logging
import math
import time
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .metrics import (
    DEFAULT_K_PARAMS,
    KParams,
    MetricKind,
    dist_affine_invariant,
    dist_log_euclidean,
    dist_spectral_quaternion,
    dist_spectral_rotation,
    distance,
)
from .sampling import DEFAULT_DOF, GENERATOR_NAME, wishart_sample
from .tensor import DiffusionTensor, spectral_decompose

logger = logging.getLogger(__name__)

MIN_BENCH_SAMPLES = 100
SWEEP_CENTER = (1.0, 0.5, 0.25)
SWEEP_MAX_ANGLE = 45.0
CIGAR_EIGENVALUES = (1.0, 0.3, 0.2)


class SweepMode(str, Enum):
    EIGENVALUES = "eigenvalues"
    ANGLE = "angle"
    BOTH = "both"


class BenchReport(BaseModel):
    """Wall times of n distance evaluations per metric on one shared sample set."""

    times: Dict[str, float] = Field(..., description="Seconds per metric, keyed by CLI name")
    n: int = Field(..., ge=MIN_BENCH_SAMPLES, description="Distances evaluated per metric")
    seed: int = Field(..., ge=0, description="Sampling seed")
    dof: int = Field(DEFAULT_DOF, description="Wishart degrees of freedom")
    generator: str = Field(GENERATOR_NAME, description="Random generator and Gaussian method")
    decomposition_in_loop: bool = Field(
        True, description="Spectral decompositions are timed inside the spectral loops"
    )

    def ratio(self, numerator: MetricKind, denominator: MetricKind) -> float:
        return self.times[MetricKind(numerator).value] / self.times[MetricKind(denominator).value]


class SweepRow(NamedTuple):
    s: float
    angle_deg: float
    ai: float
    le: float
    spectral_rot: float
    sq: float


SWEEP_HEADER = ("s", "angle_deg", "ai", "le", "spectral-rot", "sq")


def _time_loop(fn: Callable[[DiffusionTensor], float], samples: List[DiffusionTensor]) -> float:
    start = time.perf_counter()
    for s in samples:
        fn(s)
    return time.perf_counter() - start


def bench_distances(
    seed: int,
    n: int,
    dof: int = DEFAULT_DOF,
    p: KParams = DEFAULT_K_PARAMS,
) -> BenchReport:
    """Time n distances from a reference tensor for every metric.

    n + 1 Wishart samples are drawn before any timing; the first is the
    reference. Both spectral loops decompose both tensors on every call.
    """
    if n < MIN_BENCH_SAMPLES:
        raise ValueError(f"the benchmark needs n >= {MIN_BENCH_SAMPLES}, got {n}")
    samples = wishart_sample(seed, n + 1, dof)
    ref, targets = samples[0], samples[1:]

    loops: Dict[MetricKind, Callable[[DiffusionTensor], float]] = {
        MetricKind.AFFINE_INVARIANT: lambda s: dist_affine_invariant(ref, s),
        MetricKind.LOG_EUCLIDEAN: lambda s: dist_log_euclidean(ref, s),
        MetricKind.SPECTRAL_ROTATION: lambda s: dist_spectral_rotation(ref, s, p),
        MetricKind.SPECTRAL_QUATERNION: lambda s: dist_spectral_quaternion(
            spectral_decompose(ref), spectral_decompose(s), p
        ),
    }
    times = {}
    for kind, fn in loops.items():
        times[kind.value] = _time_loop(fn, targets)
        logger.info("%s: %d distances in %.4f s", kind.value, n, times[kind.value])
    return BenchReport(times=times, n=n, seed=seed, dof=dof)


def rotation_about_z(angle_deg: float) -> np.ndarray:
    theta = math.radians(angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _oriented(eigenvalues: Tuple[float, float, float], angle_deg: float) -> DiffusionTensor:
    u = rotation_about_z(angle_deg)
    return DiffusionTensor.from_matrix((u * np.array(eigenvalues)) @ u.T)


def sweep_distances(
    mode: SweepMode,
    steps: int,
    p: KParams = DEFAULT_K_PARAMS,
) -> List[SweepRow]:
    """Distances from the central tensor λ = (1, 0.5, 0.25) to swept tensors.

    ``s`` runs over [-1, 1]. Eigenvalue mode scales λ1 by 2^(s/2) and λ3 by
    2^(-s/2); angle mode rotates the tensor about z by 45·s degrees; both
    mode applies the two together. The row with s = 0 is the centre.
    """
    mode = SweepMode(mode)
    if steps < 3:
        raise ValueError(f"a sweep needs at least 3 steps, got {steps}")
    center = _oriented(SWEEP_CENTER, 0.0)
    rows = []
    for i in range(steps):
        s = (2 * i - (steps - 1)) / (steps - 1)
        eigenvalues = SWEEP_CENTER
        angle = 0.0
        if mode in (SweepMode.EIGENVALUES, SweepMode.BOTH):
            factor = 2.0 ** (0.5 * s)
            eigenvalues = (SWEEP_CENTER[0] * factor, SWEEP_CENTER[1], SWEEP_CENTER[2] / factor)
        if mode in (SweepMode.ANGLE, SweepMode.BOTH):
            angle = SWEEP_MAX_ANGLE * s
        swept = _oriented(eigenvalues, angle)
        rows.append(
            SweepRow(
                s,
                angle,
                distance(MetricKind.AFFINE_INVARIANT, center, swept, p),
                distance(MetricKind.LOG_EUCLIDEAN, center, swept, p),
                distance(MetricKind.SPECTRAL_ROTATION, center, swept, p),
                distance(MetricKind.SPECTRAL_QUATERNION, center, swept, p),
            )
        )
    return rows


def cigar_pair(angle_deg: float = 60.0) -> Tuple[DiffusionTensor, DiffusionTensor]:
    """Two cigar tensors with equal eigenvalues whose principal axes cross at ``angle_deg``."""
    return _oriented(CIGAR_EIGENVALUES, 0.0), _oriented(CIGAR_EIGENVALUES, angle_deg)
