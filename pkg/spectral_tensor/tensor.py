"""
Value types for diffusion tensors, their spectral forms and orientation quaternions.

A diffusion tensor S = U diag(λ) Uᵀ is stored either as its six unique
components or as a ``SpectralForm``: the descending eigenvalue triple and a
unit quaternion for U. U is only defined up to the group G of π-rotations
about the frame axes, so one tensor orientation corresponds to eight unit
quaternions (``orbit``). ``canonical_representative`` picks one of them
deterministically.
"""

import logging
import math
from dataclasses import dataclass, fields
from typing import Sequence, Tuple

import numpy as np

from .exceptions import DimensionMismatch, NonFinite, NotARotation, NotPositiveDefinite, TensorError

logger = logging.getLogger(__name__)

PD_EPSILON = 1e-12
UNIT_TOLERANCE = 1e-12
ROTATION_TOLERANCE = 1e-9
SIN_THRESHOLD = 1e-6
DEGENERACY_GAP = 1e-8

Eigenvalues = Tuple[float, float, float]
Dims = Tuple[int, int, int]
Spacing = Tuple[float, float, float]


@dataclass(frozen=True)
class DiffusionTensor:
    """3×3 symmetric positive-definite tensor stored by its six unique entries."""

    dxx: float
    dxy: float
    dxz: float
    dyy: float
    dyz: float
    dzz: float

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        components = self.components()
        if not all(math.isfinite(c) for c in components):
            raise NonFinite(f"non-finite tensor component in {components}")
        w = np.linalg.eigvalsh(self.as_matrix())
        floor = PD_EPSILON * max(1.0, float(w[-1]))
        if w[0] <= floor:
            raise NotPositiveDefinite(
                f"smallest eigenvalue {float(w[0]):.17g} is not above {floor:.3g}",
                eigenvalue=float(w[0]),
            )

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "DiffusionTensor":
        """Build a tensor from a 3×3 matrix, averaging the off-diagonal pairs."""
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise TensorError(f"expected a 3x3 matrix, got shape {m.shape}")
        return cls(
            m[0, 0],
            0.5 * (m[0, 1] + m[1, 0]),
            0.5 * (m[0, 2] + m[2, 0]),
            m[1, 1],
            0.5 * (m[1, 2] + m[2, 1]),
            m[2, 2],
        )

    @classmethod
    def identity(cls) -> "DiffusionTensor":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, l1: float, l2: float, l3: float) -> "DiffusionTensor":
        return cls(l1, 0.0, 0.0, l2, 0.0, l3)

    def components(self) -> Tuple[float, float, float, float, float, float]:
        return (self.dxx, self.dxy, self.dxz, self.dyy, self.dyz, self.dzz)

    def as_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.dxx, self.dxy, self.dxz],
                [self.dxy, self.dyy, self.dyz],
                [self.dxz, self.dyz, self.dzz],
            ]
        )

    def eigenvalues(self) -> Eigenvalues:
        """Eigenvalues in descending order."""
        w = np.linalg.eigvalsh(self.as_matrix())
        return (float(w[2]), float(w[1]), float(w[0]))

    def determinant(self) -> float:
        return float(np.prod(self.eigenvalues()))

    def congruence(self, g: np.ndarray) -> "DiffusionTensor":
        """Return G S Gᵀ; a rotation for G rotates the tensor."""
        g = np.asarray(g, dtype=float)
        return DiffusionTensor.from_matrix(g @ self.as_matrix() @ g.T)

    def scaled(self, alpha: float) -> "DiffusionTensor":
        return DiffusionTensor(*(alpha * c for c in self.components()))


def validate_spd(components: Sequence[float]) -> DiffusionTensor:
    """Validate six components (dxx, dxy, dxz, dyy, dyz, dzz) as an SPD tensor."""
    values = tuple(components)
    if len(values) != 6:
        raise TensorError(f"a diffusion tensor has 6 components, got {len(values)}")
    return DiffusionTensor(*values)


@dataclass(frozen=True)
class UnitQuaternion:
    """Unit quaternion (a, V) with a = cos(θ/2) and V = sin(θ/2)·w."""

    a: float
    v1: float
    v2: float
    v3: float

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        norm = math.sqrt(math.fsum(c * c for c in self.as_tuple()))
        if not math.isfinite(norm) or abs(norm - 1.0) > UNIT_TOLERANCE:
            raise TensorError(f"quaternion norm {norm!r} is not 1")

    @classmethod
    def from_array(cls, q: Sequence[float], normalize: bool = False) -> "UnitQuaternion":
        arr = np.asarray(q, dtype=float)
        if arr.shape != (4,):
            raise TensorError(f"a quaternion has 4 components, got shape {arr.shape}")
        if normalize:
            norm = float(np.linalg.norm(arr))
            if norm == 0.0 or not math.isfinite(norm):
                raise TensorError("cannot normalize a zero or non-finite quaternion")
            arr = arr / norm
        return cls(*arr.tolist())

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.v1, self.v2, self.v3])

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a, self.v1, self.v2, self.v3)

    @property
    def angle(self) -> float:
        """Rotation angle θ in [0, 2π]."""
        return 2.0 * math.acos(min(1.0, max(-1.0, self.a)))

    @property
    def axis(self) -> Tuple[float, float, float]:
        """Rotation axis w; (1, 0, 0) when the rotation is the identity."""
        n = math.sqrt(self.v1 * self.v1 + self.v2 * self.v2 + self.v3 * self.v3)
        if n == 0.0:
            return (1.0, 0.0, 0.0)
        return (self.v1 / n, self.v2 / n, self.v3 / n)

    def dot(self, other: "UnitQuaternion") -> float:
        return self.a * other.a + self.v1 * other.v1 + self.v2 * other.v2 + self.v3 * other.v3

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.a, -self.v1, -self.v2, -self.v3)

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return UnitQuaternion.from_array(quat_multiply(self.as_array(), other.as_array()), True)


IDENTITY_QUATERNION = UnitQuaternion(1.0, 0.0, 0.0, 0.0)


def quat_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product p ⊗ q of two quaternion arrays."""
    a1, x1, y1, z1 = p
    a2, x2, y2, z2 = q
    return np.array(
        [
            a1 * a2 - x1 * x2 - y1 * y2 - z1 * z2,
            a1 * x2 + x1 * a2 + y1 * z2 - z1 * y2,
            a1 * y2 - x1 * z2 + y1 * a2 + z1 * x2,
            a1 * z2 + x1 * y2 - y1 * x2 + z1 * a2,
        ]
    )


def quat_array_to_rotation(q: np.ndarray) -> np.ndarray:
    a, x, y, z = (float(c) for c in q)
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - a * z), 2.0 * (x * z + a * y)],
            [2.0 * (x * y + a * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - a * x)],
            [2.0 * (x * z - a * y), 2.0 * (y * z + a * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def quat_to_rotation(q: UnitQuaternion) -> np.ndarray:
    """Rotation matrix of a unit quaternion, exp of the skew matrix of θ·w.

    The entries are quadratic in the components, so q and -q give the same
    matrix bit for bit.
    """
    return quat_array_to_rotation(q.as_array())


def _rotation_to_quat_array(r: np.ndarray) -> np.ndarray:
    (r00, r01, r02), (r10, r11, r12), (r20, r21, r22) = r.tolist()
    trace = r00 + r11 + r22
    skew = (r21 - r12, r02 - r20, r10 - r01)
    # ‖skew‖ = 2 sin θ
    two_sin = math.hypot(*skew)
    theta = math.atan2(two_sin, trace - 1.0)

    if trace >= 1.0 and two_sin >= 2.0 * SIN_THRESHOLD:
        scale = math.sin(0.5 * theta) / two_sin
        q = [math.cos(0.5 * theta), skew[0] * scale, skew[1] * scale, skew[2] * scale]
    else:
        # Shepperd: divide by the largest of the four squared components.
        pivot = max(range(4), key=lambda i: (trace, r00, r11, r22)[i])
        if pivot == 0:
            s = 2.0 * math.sqrt(1.0 + trace)
            q = [0.25 * s, (r21 - r12) / s, (r02 - r20) / s, (r10 - r01) / s]
        elif pivot == 1:
            s = 2.0 * math.sqrt(max(0.0, 1.0 + r00 - r11 - r22))
            q = [(r21 - r12) / s, 0.25 * s, (r01 + r10) / s, (r02 + r20) / s]
        elif pivot == 2:
            s = 2.0 * math.sqrt(max(0.0, 1.0 - r00 + r11 - r22))
            q = [(r02 - r20) / s, (r01 + r10) / s, 0.25 * s, (r12 + r21) / s]
        else:
            s = 2.0 * math.sqrt(max(0.0, 1.0 - r00 - r11 + r22))
            q = [(r10 - r01) / s, (r02 + r20) / s, (r12 + r21) / s, 0.25 * s]

    arr = np.array(q)
    return arr / np.linalg.norm(arr)


def rotation_to_quat(r: np.ndarray) -> UnitQuaternion:
    """Unit quaternion of a rotation matrix.

    Uses the angle/axis construction for θ ≤ π/2 with θ = atan2(2 sin θ, 2 cos θ),
    and the largest-diagonal branch for wider angles or when |sin θ| < 1e-6.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        raise NotARotation("expected a finite 3x3 matrix")
    if np.max(np.abs(r.T @ r - np.eye(3))) > ROTATION_TOLERANCE:
        raise NotARotation("matrix is not orthogonal")
    if abs(np.linalg.det(r) - 1.0) > ROTATION_TOLERANCE:
        raise NotARotation("matrix has determinant -1")
    return UnitQuaternion(*_rotation_to_quat_array(r).tolist())


@dataclass(frozen=True)
class QuaternionOrbit:
    """The eight unit quaternions ±q⊗g, g ∈ {1, i, j, k}, of one tensor orientation."""

    members: Tuple[UnitQuaternion, ...]

    def __post_init__(self) -> None:
        if len(self.members) != 8:
            raise TensorError(f"an orbit has 8 members, got {len(self.members)}")

    def as_array(self) -> np.ndarray:
        return np.array([m.as_tuple() for m in self.members])


def orbit_array(q: np.ndarray) -> np.ndarray:
    """Array form of ``orbit``: an (8, 4) array, rows q⊗1, q⊗i, q⊗j, q⊗k, then negated.

    Right multiplication by i, j, k only permutes and negates components, so
    the orbit of any member is the same set of floats.
    """
    a, x, y, z = (float(c) for c in q)
    right = np.array(
        [
            [a, x, y, z],
            [-x, a, z, -y],
            [-y, -z, a, x],
            [-z, y, -x, a],
        ]
    )
    return np.concatenate((right, -right))


def orbit(q: UnitQuaternion) -> QuaternionOrbit:
    rows = orbit_array(q.as_array()).tolist()
    return QuaternionOrbit(tuple(UnitQuaternion(*row) for row in rows))


def canonical_array(q: np.ndarray) -> np.ndarray:
    members = orbit_array(q)
    best = members[np.lexsort(members.T[::-1])[-1]]
    # +0.0 turns -0.0 into 0.0
    return best + 0.0


def canonical_representative(q: UnitQuaternion) -> UnitQuaternion:
    """Lexicographically greatest member of orbit(q) under (a, v1, v2, v3)."""
    return UnitQuaternion(*canonical_array(q.as_array()).tolist())


@dataclass(frozen=True)
class SpectralForm:
    """Descending eigenvalues and canonical orientation quaternion of a tensor."""

    eigenvalues: Eigenvalues
    q: UnitQuaternion

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.eigenvalues)
        if len(values) != 3 or not all(math.isfinite(v) for v in values):
            raise TensorError(f"expected three finite eigenvalues, got {values}")
        if not (values[0] >= values[1] >= values[2] > 0.0):
            raise TensorError(f"eigenvalues must satisfy l1 >= l2 >= l3 > 0, got {values}")
        object.__setattr__(self, "eigenvalues", values)

    def rotation(self) -> np.ndarray:
        return quat_to_rotation(self.q)

    def matrix(self) -> np.ndarray:
        u = self.rotation()
        return (u * np.array(self.eigenvalues)) @ u.T

    def log_eigenvalues(self) -> np.ndarray:
        return np.log(np.array(self.eigenvalues))

    def determinant(self) -> float:
        l1, l2, l3 = self.eigenvalues
        return l1 * l2 * l3

    def principal_axis(self) -> np.ndarray:
        return self.rotation()[:, 0]


def spectral_decompose(s: DiffusionTensor) -> SpectralForm:
    """Eigenvalues sorted descending and the canonical quaternion of the eigenframe.

    The eigenframe is made proper (det U = +1) by negating its third column.
    Near-degenerate eigenvalues are accepted; the orientation then follows the
    solver's deterministic frame.
    """
    w, v = np.linalg.eigh(s.as_matrix())
    w = w[::-1]
    u = v[:, ::-1].copy()
    if np.linalg.det(u) < 0.0:
        u[:, 2] = -u[:, 2]

    l1, l2, l3 = float(w[0]), float(w[1]), float(w[2])
    if l1 - l2 < DEGENERACY_GAP * l1 or l2 - l3 < DEGENERACY_GAP * l1:
        logger.debug("near-degenerate eigenvalues %s, orientation may be discontinuous", w)

    q = canonical_array(_rotation_to_quat_array(u))
    return SpectralForm((l1, l2, l3), UnitQuaternion(*q.tolist()))


def compose(f: SpectralForm) -> DiffusionTensor:
    """Rebuild U diag(λ) Uᵀ with U = quat_to_rotation(f.q)."""
    return DiffusionTensor.from_matrix(f.matrix())


@dataclass(frozen=True)
class TensorField:
    """Regular grid of tensors, voxels stored x-fastest."""

    dims: Dims
    spacing: Spacing
    voxels: Tuple[DiffusionTensor, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        spacing = tuple(float(s) for s in self.spacing)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise DimensionMismatch(f"dims must be three positive integers, got {self.dims}")
        if len(spacing) != 3 or not all(math.isfinite(s) and s > 0.0 for s in spacing):
            raise DimensionMismatch(f"spacing must be three positive reals, got {self.spacing}")
        voxels = tuple(self.voxels)
        if len(voxels) != dims[0] * dims[1] * dims[2]:
            raise DimensionMismatch(
                f"{len(voxels)} voxels do not fill a {dims[0]}x{dims[1]}x{dims[2]} grid"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "voxels", voxels)

    @classmethod
    def constant(
        cls,
        dims: Dims,
        tensor: DiffusionTensor,
        spacing: Spacing = (1.0, 1.0, 1.0),
    ) -> "TensorField":
        return cls(dims, spacing, (tensor,) * (dims[0] * dims[1] * dims[2]))

    @property
    def size(self) -> int:
        return len(self.voxels)

    def index(self, i: int, j: int, k: int) -> int:
        nx, ny, _ = self.dims
        return i + nx * (j + ny * k)

    def voxel(self, i: int, j: int, k: int) -> DiffusionTensor:
        return self.voxels[self.index(i, j, k)]
