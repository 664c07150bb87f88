"""
Scalar anisotropy indices of diffusion tensors.

Hilbert anisotropy (HA) is the projective distance to the identity,
log(λmax/λmin). FA and RA follow the Basser-Pierpaoli conventions and GA is
the spread of the log-eigenvalues around their mean.
"""

import math
from enum import Enum
from typing import List, NamedTuple, Sequence

import numpy as np

SWEEP_T_MIN = 1e-3
SPHERICAL_T = 1.0 / 3.0


class AnisoIndexKind(str, Enum):
    """Anisotropy indices compared in the sweep."""

    HA = "HA"
    FA = "FA"
    RA = "RA"
    GA = "GA"


class AnisoRow(NamedTuple):
    t: float
    HA: float
    FA: float
    RA: float
    GA: float


def _sorted_eigenvalues(l: Sequence[float]) -> np.ndarray:
    lam = np.sort(np.asarray(l, dtype=float))[::-1]
    if lam.shape != (3,):
        raise ValueError(f"expected an eigenvalue triple, got {len(lam)} values")
    if lam[2] < 0.0 or not np.all(np.isfinite(lam)):
        raise ValueError(f"eigenvalues must be finite and nonnegative, got {lam.tolist()}")
    return lam


def hilbert_anisotropy(l: Sequence[float]) -> float:
    """HA = log(λmax/λmin); +inf for a rank-deficient triple."""
    hi = max(l)
    lo = min(l)
    if lo < 0.0:
        raise ValueError(f"eigenvalues must be nonnegative, got {tuple(l)}")
    if lo == 0.0:
        return math.inf
    return math.log(hi / lo)


def fractional_anisotropy(lam: np.ndarray) -> float:
    dev = np.linalg.norm(lam - lam.mean())
    return float(math.sqrt(1.5) * dev / np.linalg.norm(lam))


def relative_anisotropy(lam: np.ndarray) -> float:
    dev = np.linalg.norm(lam - lam.mean())
    return float(dev / (math.sqrt(3.0) * lam.mean()))


def geodesic_anisotropy(lam: np.ndarray) -> float:
    with np.errstate(divide="ignore"):
        logs = np.log(lam)
    if not np.all(np.isfinite(logs)):
        return math.inf
    return float(np.linalg.norm(logs - logs.mean()))


def classical_index(kind: AnisoIndexKind, l: Sequence[float]) -> float:
    """Evaluate one anisotropy index; inputs are re-sorted descending first."""
    kind = AnisoIndexKind(kind)
    lam = _sorted_eigenvalues(l)
    if kind is AnisoIndexKind.HA:
        return hilbert_anisotropy(lam.tolist())
    if kind is AnisoIndexKind.FA:
        return fractional_anisotropy(lam)
    if kind is AnisoIndexKind.RA:
        return relative_anisotropy(lam)
    return geodesic_anisotropy(lam)


def all_indices(l: Sequence[float]) -> dict:
    return {kind.value: classical_index(kind, l) for kind in AnisoIndexKind}


def aniso_sweep(steps: int) -> List[AnisoRow]:
    """Indices along λ = (t, (1-t)/2, (1-t)/2) for t = linspace(1e-3, 1, steps).

    The tensor goes from planar to spherical at t = 1/3 and towards a single
    direction as t -> 1. The interior sample nearest 1/3 is moved onto 1/3
    so the spherical point is always in the table. At t = 1 the triple is
    rank-deficient: HA and GA are reported as +inf, FA and RA as their
    finite limits.
    """
    if steps < 2:
        raise ValueError(f"a sweep needs at least 2 steps, got {steps}")
    ts = np.linspace(SWEEP_T_MIN, 1.0, steps)
    if steps > 2:
        ts[1 + int(np.argmin(np.abs(ts[1:-1] - SPHERICAL_T)))] = SPHERICAL_T
    rows = []
    for t in ts.tolist():
        lam = (t, 0.5 * (1.0 - t), 0.5 * (1.0 - t))
        values = all_indices(lam)
        rows.append(AnisoRow(t, values["HA"], values["FA"], values["RA"], values["GA"]))
    return rows
