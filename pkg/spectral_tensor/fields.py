"""
Interpolation of tensors along curves and on grids, field resampling, and field files.

Grid interpolation is a weighted mean of the cell's corner tensors with the
trilinear weights of the sample point; 2D cells use the z = 0 face and 1D
cells reduce to the weights (1 - t, t). Fields are stored in the DTF1 binary
format or its plain-text variant.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .anisotropy import fractional_anisotropy, hilbert_anisotropy
from .exceptions import (
    BadMagic,
    DimensionMismatch,
    FieldFormatError,
    NotPositiveDefinite,
    OutOfRange,
    TensorError,
    TruncatedFile,
    UnsupportedMetric,
    VoxelError,
)
from .means import WeightedTensorSet, mean_affine_invariant, mean_log_euclidean, mean_n
from .metrics import DEFAULT_K_PARAMS, KParams, MetricKind
from .tensor import Dims, DiffusionTensor, SpectralForm, TensorField, compose, spectral_decompose

logger = logging.getLogger(__name__)

FIELD_MAGIC = b"DTF1"
TEXT_HEADER = "# dtf-text"
HEADER_SIZE = 4 + 3 * 4 + 3 * 8
VOXEL_SIZE = 6 * 8

# Corner α = (a1, a2, a3) is stored at index a1 + 2·a2 + 4·a3.
CORNERS: Tuple[Tuple[int, int, int], ...] = tuple(
    (a & 1, (a >> 1) & 1, (a >> 2) & 1) for a in range(8)
)

INTERPOLATING_METRICS = (
    MetricKind.SPECTRAL_QUATERNION,
    MetricKind.LOG_EUCLIDEAN,
    MetricKind.AFFINE_INVARIANT,
)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class GridWeights:
    """Weights of the 8 corners of the unit cube at one sample point."""

    x: Tuple[float, float, float]
    weights: Tuple[float, ...]

    @property
    def corners(self) -> Tuple[Tuple[int, int, int], ...]:
        return CORNERS

    def weight(self, a1: int, a2: int, a3: int) -> float:
        return self.weights[a1 + 2 * a2 + 4 * a3]

    def nonzero(self) -> Iterator[Tuple[int, float]]:
        """(corner index, weight) pairs with a positive weight."""
        return ((i, w) for i, w in enumerate(self.weights) if w > 0.0)


class CurveSample(NamedTuple):
    t: float
    HA: float
    FA: float
    det: float
    phi: float


def trilinear_weights(x: Sequence[float]) -> GridWeights:
    """w_α(x) = Π_i (1 - α_i + (-1)^(1-α_i) x_i).

    Each factor is x_i for α_i = 1 and 1 - x_i otherwise.
    """
    coords = tuple(float(c) for c in x)
    if len(coords) != 3:
        raise OutOfRange(f"expected a point with 3 coordinates, got {len(coords)}")
    for c in coords:
        if not (0.0 <= c <= 1.0):
            raise OutOfRange(f"coordinate {c!r} is outside [0, 1]")

    weights = []
    for corner in CORNERS:
        w = 1.0
        for a, c in zip(corner, coords):
            w *= c if a else 1.0 - c
        weights.append(w)
    return GridWeights((coords[0], coords[1], coords[2]), tuple(weights))


def _check_metric(metric: MetricKind) -> MetricKind:
    metric = MetricKind(metric)
    if metric not in INTERPOLATING_METRICS:
        raise UnsupportedMetric(f"metric {metric.value!r} does not define an interpolation")
    return metric


def _blend(
    forms: Sequence[SpectralForm],
    weights: Sequence[float],
    metric: MetricKind,
    p: KParams,
) -> DiffusionTensor:
    tensor_set = WeightedTensorSet(tuple(forms), tuple(weights))
    if metric is MetricKind.SPECTRAL_QUATERNION:
        # curves, cells and fields all use the k-weighted N-tensor mean
        return compose(mean_n(tensor_set, p))
    if metric is MetricKind.LOG_EUCLIDEAN:
        return mean_log_euclidean(tensor_set)
    return mean_affine_invariant(tensor_set)


def interp_curve(
    s1: SpectralForm,
    s2: SpectralForm,
    steps: int,
    metric: MetricKind = MetricKind.SPECTRAL_QUATERNION,
    p: KParams = DEFAULT_K_PARAMS,
) -> List[DiffusionTensor]:
    """Means with weights (1 - t, t) at t = 0, 1/(steps-1), ..., 1."""
    metric = _check_metric(metric)
    if steps < 2:
        raise ValueError(f"a curve needs at least 2 samples, got {steps}")
    samples = []
    for i in range(steps):
        t = i / (steps - 1)
        samples.append(_blend((s1, s2), (1.0 - t, t), metric, p))
    return samples


def curve_diagnostics(samples: Sequence[DiffusionTensor]) -> List[CurveSample]:
    """HA, FA, determinant and principal-axis angle φ (degrees, from sample 0) along a curve."""
    if not samples:
        return []
    n = len(samples)
    forms = [spectral_decompose(s) for s in samples]
    axis0 = forms[0].principal_axis()
    rows = []
    for i, f in enumerate(forms):
        cos_phi = min(1.0, abs(float(np.dot(axis0, f.principal_axis()))))
        rows.append(
            CurveSample(
                t=i / (n - 1) if n > 1 else 0.0,
                HA=hilbert_anisotropy(f.eigenvalues),
                FA=fractional_anisotropy(np.array(f.eigenvalues)),
                det=f.determinant(),
                phi=math.degrees(math.acos(cos_phi)),
            )
        )
    return rows


def interpolate_grid(
    corners: Sequence[SpectralForm],
    x: Sequence[float],
    metric: MetricKind = MetricKind.SPECTRAL_QUATERNION,
    p: KParams = DEFAULT_K_PARAMS,
) -> DiffusionTensor:
    """Interpolate inside a square (4 corners) or cube (8 corners) cell.

    Corners are ordered x-fastest. For a square, ``x`` has 2 coordinates (or 3
    with z = 0). Corners with zero weight are left out of the mean.
    """
    metric = _check_metric(metric)
    point = [float(c) for c in x]
    if len(corners) == 4:
        if len(point) == 3:
            if point[2] != 0.0:
                raise OutOfRange(f"a square cell has z = 0, got {point[2]!r}")
            point = point[:2]
        if len(point) != 2:
            raise OutOfRange(f"expected a 2D point for a square cell, got {x}")
        point.append(0.0)
    elif len(corners) != 8:
        raise ValueError(f"a cell has 4 or 8 corners, got {len(corners)}")

    gw = trilinear_weights(point)
    used = list(gw.nonzero())
    if len(used) == 1:
        return compose(corners[used[0][0]])
    return _blend([corners[i] for i, _ in used], [w for _, w in used], metric, p)


def _axis_plan(n_in: int, n_out: int) -> List[Tuple[int, int, float]]:
    plan = []
    for i in range(n_out):
        if n_in == 1:
            plan.append((0, 0, 0.0))
            continue
        x = i * (n_in - 1) / (n_out - 1) if n_out > 1 else 0.0
        lo = min(max(int(math.floor(x)), 0), n_in - 2)
        frac = min(max(x - lo, 0.0), 1.0)
        plan.append((lo, lo + 1, frac))
    return plan


def resample_field(
    f: TensorField,
    new_dims: Dims,
    metric: MetricKind = MetricKind.SPECTRAL_QUATERNION,
    p: KParams = DEFAULT_K_PARAMS,
    threads: int = 1,
) -> TensorField:
    """Resample a field onto ``new_dims`` voxels spanning the same extent.

    Output voxel i on an axis sits at input coordinate i·(n_in-1)/(n_out-1).
    A voxel landing exactly on an input voxel is copied unchanged. Voxels are
    independent; ``threads`` > 1 evaluates them on a thread pool with
    identical results.
    """
    metric = _check_metric(metric)
    dims = tuple(int(d) for d in new_dims)
    if len(dims) != 3 or any(d <= 0 for d in dims):
        raise ValueError(f"new dims must be three positive integers, got {new_dims}")
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}")

    forms = [spectral_decompose(v) for v in f.voxels]
    plans = [_axis_plan(n_in, n_out) for n_in, n_out in zip(f.dims, dims)]
    nx, ny, nz = dims

    def voxel(index: int) -> DiffusionTensor:
        i, rest = index % nx, index // nx
        j, k = rest % ny, rest // ny
        cells = (plans[0][i], plans[1][j], plans[2][k])
        try:
            gw = trilinear_weights([c[2] for c in cells])
            used = []
            for corner, w in gw.nonzero():
                ijk = [cell[1] if a else cell[0] for a, cell in zip(CORNERS[corner], cells)]
                used.append((f.index(*ijk), w))
            if len(used) == 1:
                return f.voxels[used[0][0]]
            return _blend([forms[src] for src, _ in used], [w for _, w in used], metric, p)
        except Exception as e:
            raise VoxelError(index, e) from e

    total = nx * ny * nz
    logger.debug("resampling %s -> %s with %d thread(s)", f.dims, dims, threads)
    if threads == 1:
        voxels = [voxel(index) for index in range(total)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            voxels = list(pool.map(voxel, range(total)))

    spacing = tuple(
        s * (n_in - 1) / (n_out - 1) if n_in > 1 and n_out > 1 else s
        for s, n_in, n_out in zip(f.spacing, f.dims, dims)
    )
    return TensorField(dims, (spacing[0], spacing[1], spacing[2]), tuple(voxels))


def _voxel_tensor(values: Sequence[float], index: int) -> DiffusionTensor:
    try:
        return DiffusionTensor(*values)
    except NotPositiveDefinite as e:
        raise NotPositiveDefinite(
            f"voxel {index}: {e}", eigenvalue=e.eigenvalue, voxel_index=index
        ) from e
    except TensorError as e:
        raise VoxelError(index, e) from e


def _read_binary(data: bytes) -> TensorField:
    if len(data) < HEADER_SIZE:
        raise TruncatedFile(f"header needs {HEADER_SIZE} bytes, file has {len(data)}")
    dims = tuple(int(d) for d in np.frombuffer(data, dtype="<u4", count=3, offset=4))
    spacing = tuple(float(s) for s in np.frombuffer(data, dtype="<f8", count=3, offset=16))
    n = dims[0] * dims[1] * dims[2]
    expected = HEADER_SIZE + n * VOXEL_SIZE
    if len(data) < expected:
        raise TruncatedFile(f"expected {expected} bytes for {n} voxels, file has {len(data)}")
    if len(data) > expected:
        raise DimensionMismatch(f"{len(data) - expected} bytes beyond the {n} declared voxels")
    values = np.frombuffer(data, dtype="<f8", count=n * 6, offset=HEADER_SIZE).reshape(n, 6)
    voxels = tuple(_voxel_tensor(row, i) for i, row in enumerate(values.tolist()))
    return TensorField(dims, spacing, voxels)  # type: ignore[arg-type]


def _parse_floats(tokens: Sequence[str], what: str) -> List[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as e:
        raise FieldFormatError(f"invalid number in {what}: {e}") from e


def _read_text(text: str) -> TensorField:
    lines = text.splitlines()
    header = lines[0][len(TEXT_HEADER) :].split()
    if len(header) not in (3, 6):
        raise FieldFormatError(f"text header needs 3 dims and optional spacing, got {header}")
    try:
        dims = tuple(int(d) for d in header[:3])
    except ValueError as e:
        raise FieldFormatError(f"invalid dims in text header: {e}") from e
    spacing = tuple(_parse_floats(header[3:], "header")) if len(header) == 6 else (1.0, 1.0, 1.0)

    rows = []
    for line in lines[1:]:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values = _parse_floats(stripped.split(), f"voxel {len(rows)}")
        if len(values) != 6:
            raise DimensionMismatch(f"voxel {len(rows)} has {len(values)} values, expected 6")
        rows.append(values)

    n = dims[0] * dims[1] * dims[2]
    if len(rows) < n:
        raise TruncatedFile(f"expected {n} voxels, file has {len(rows)}")
    if len(rows) > n:
        raise DimensionMismatch(f"{len(rows)} voxels do not fit the declared {n}")
    voxels = tuple(_voxel_tensor(row, i) for i, row in enumerate(rows))
    return TensorField(dims, spacing, voxels)  # type: ignore[arg-type]


def parse_field(data: bytes) -> TensorField:
    """Decode field bytes in either format, chosen by the leading magic."""
    if data.startswith(FIELD_MAGIC):
        return _read_binary(data)
    if data.startswith(TEXT_HEADER.encode("ascii")):
        try:
            return _read_text(data.decode("utf-8"))
        except UnicodeDecodeError as e:
            raise FieldFormatError(f"text field is not UTF-8: {e}") from e
    raise BadMagic(f"unknown field header {data[:10]!r}")


def read_field(path: PathLike) -> TensorField:
    """Read and validate a DTF1 or dtf-text field file."""
    field = parse_field(Path(path).read_bytes())
    logger.debug("read %s field from %s", field.dims, path)
    return field


def read_tensors(path: PathLike) -> List[DiffusionTensor]:
    """Tensors listed in a field file or in a plain file of six numbers per line.

    Blank lines and lines starting with ``#`` are skipped in plain files.
    """
    data = Path(path).read_bytes()
    if data.startswith(FIELD_MAGIC) or data.startswith(TEXT_HEADER.encode("ascii")):
        return list(parse_field(data).voxels)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise BadMagic(f"{path} is neither a field file nor a text tensor list") from e

    tensors = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values = _parse_floats(stripped.replace(",", " ").split(), f"tensor {len(tensors)}")
        if len(values) != 6:
            raise DimensionMismatch(f"tensor {len(tensors)} has {len(values)} values, expected 6")
        tensors.append(_voxel_tensor(values, len(tensors)))
    if not tensors:
        raise TruncatedFile(f"no tensors in {path}")
    return tensors


def encode_field(f: TensorField, text: bool = False) -> bytes:
    if text:
        lines = [
            f"{TEXT_HEADER} {f.dims[0]} {f.dims[1]} {f.dims[2]} "
            + " ".join(format(s, ".17g") for s in f.spacing)
        ]
        lines.extend(" ".join(format(c, ".17g") for c in v.components()) for v in f.voxels)
        return ("\n".join(lines) + "\n").encode("utf-8")
    components = np.array([v.components() for v in f.voxels], dtype="<f8")
    return (
        FIELD_MAGIC
        + np.asarray(f.dims, dtype="<u4").tobytes()
        + np.asarray(f.spacing, dtype="<f8").tobytes()
        + components.tobytes()
    )


def write_field(f: TensorField, path: PathLike, text: Optional[bool] = None) -> None:
    """Write a field as DTF1, or as dtf-text when ``text`` is set or the path ends in .txt."""
    path = Path(path)
    if text is None:
        text = path.suffix.lower() == ".txt"
    path.write_bytes(encode_field(f, text=text))
    logger.debug("wrote %s field to %s", f.dims, path)
