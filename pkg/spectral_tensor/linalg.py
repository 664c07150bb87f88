"""
Matrix functions of symmetric matrices computed through the eigendecomposition.
"""

from typing import Callable

import numpy as np


def sym_apply(m: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to the eigenvalues of a symmetric matrix.

    Returns ``V fn(diag(w)) V^T`` where ``m = V diag(w) V^T``. Only the lower
    triangle of ``m`` is read.
    """
    w, v = np.linalg.eigh(m)
    return (v * fn(w)) @ v.T


def logm(m: np.ndarray) -> np.ndarray:
    """Matrix logarithm of an SPD matrix."""
    return sym_apply(m, np.log)


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a symmetric matrix."""
    return sym_apply(m, np.exp)


def sqrtm(m: np.ndarray) -> np.ndarray:
    """Principal square root of an SPD matrix."""
    return sym_apply(m, np.sqrt)


def invsqrtm(m: np.ndarray) -> np.ndarray:
    """Inverse principal square root of an SPD matrix."""
    return sym_apply(m, lambda w: 1.0 / np.sqrt(w))


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)
