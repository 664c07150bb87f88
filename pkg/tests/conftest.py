"""
Test configuration for pytest.
"""

from typing import Callable

import numpy as np
import pytest

from spectral_tensor.config import Config, RuntimeConfig, ServerConfig
from spectral_tensor.sampling import random_rotation, random_spd
from spectral_tensor.tensor import DiffusionTensor


@pytest.fixture
def rng():
    """Create a seeded generator."""
    return np.random.Generator(np.random.PCG64(20240611))


@pytest.fixture
def make_spd(rng) -> Callable[..., DiffusionTensor]:
    """Factory for random tensors with eigenvalues in [0.5, 5] and a random frame.

    Eigenvalues are kept at least ``min_gap`` apart so eigenvectors are well defined.
    """

    def factory(low: float = 0.5, high: float = 5.0, min_gap: float = 0.05) -> DiffusionTensor:
        while True:
            s = random_spd(rng, low, high)
            l1, l2, l3 = s.eigenvalues()
            if l1 - l2 >= min_gap and l2 - l3 >= min_gap:
                return s

    return factory


@pytest.fixture
def make_rotation(rng) -> Callable[[], np.ndarray]:
    """Factory for uniformly random rotation matrices."""
    return lambda: random_rotation(rng)


@pytest.fixture
def anisotropic():
    """A tensor with well separated eigenvalues in a generic frame."""
    c, s = np.cos(0.4), np.sin(0.4)
    u = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return DiffusionTensor.from_matrix((u * np.array([3.0, 1.5, 0.5])) @ u.T)


@pytest.fixture
def runtime_config():
    """Create a test runtime configuration."""
    return RuntimeConfig(k_slope=3.0, k_offset=7.0, threads=1, log_level="INFO")


@pytest.fixture
def server_config():
    """Create a test server configuration."""
    return ServerConfig(host="127.0.0.1", port=8000, disabled_tools=[])


@pytest.fixture
def config(runtime_config, server_config):
    """Create a test configuration."""
    return Config(runtime=runtime_config, server=server_config)


@pytest.fixture
def tensor_file(tmp_path):
    """Write tensors as a plain six-column file and return its path."""

    def write(name: str, *tensors: DiffusionTensor) -> str:
        path = tmp_path / name
        lines = ["# dxx dxy dxz dyy dyz dzz"]
        lines += [" ".join(format(c, ".17g") for c in t.components()) for t in tensors]
        path.write_text("\n".join(lines) + "\n")
        return str(path)

    return write
