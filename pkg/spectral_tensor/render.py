"""
SVG glyph rendering of tensors.

Each tensor is drawn as the orthographic shadow of its diffusion ellipsoid
on the xy plane: the ellipse whose matrix is the upper-left 2×2 block of S.
Fill colours run from yellow (index 0) to red (the largest index drawn).
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from lxml import etree

from .anisotropy import AnisoIndexKind, classical_index
from .means import WeightedTensorSet, mean_log_euclidean, mean_pair
from .metrics import DEFAULT_K_PARAMS, KParams
from .tensor import DiffusionTensor, TensorField, compose, spectral_decompose

logger = logging.getLogger(__name__)

SVG_NS = {
    None: "http://www.w3.org/2000/svg",
}

CELL_SIZE = 60.0
GLYPH_FILL = 0.45
PRECISION = 5
CIRCLE_TOLERANCE = 1e-9

COLORINGS = (AnisoIndexKind.HA, AnisoIndexKind.FA)

PathLike = Union[str, Path]


def svg_ns(tag: str) -> str:
    """Prepend the SVG namespace to ``tag``."""
    return "{%s}%s" % (SVG_NS[None], tag)


def _fmt(value: float) -> str:
    # Fixed precision, trailing zeros stripped
    text = ("%%.%df" % PRECISION) % value
    text = text.rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _color(value: float, vmax: float) -> str:
    t = 0.0 if vmax <= 0.0 or not math.isfinite(value) else min(1.0, value / vmax)
    green = int(round(255 * (1.0 - t)))
    return "#ff%02x00" % green


def _glyph_axes(s: DiffusionTensor) -> Tuple[float, float, float]:
    """Semi-axes (major, minor) and major-axis angle in degrees of the xy shadow."""
    w, v = np.linalg.eigh(s.as_matrix()[:2, :2])
    major = v[:, 1]
    angle = math.degrees(math.atan2(major[1], major[0]))
    # The axis is undirected
    if angle <= -90.0:
        angle += 180.0
    elif angle > 90.0:
        angle -= 180.0
    return math.sqrt(w[1]), math.sqrt(w[0]), angle


def _layout(
    tensors: Union[Sequence[DiffusionTensor], TensorField],
    slice_index: int,
) -> Tuple[List[Tuple[DiffusionTensor, int, int]], int, int]:
    if isinstance(tensors, TensorField):
        nx, ny, nz = tensors.dims
        if not 0 <= slice_index < nz:
            raise ValueError(f"slice {slice_index} is outside 0..{nz - 1}")
        cells = [
            (tensors.voxel(i, j, slice_index), i, ny - 1 - j) for j in range(ny) for i in range(nx)
        ]
        return cells, nx, ny
    items = list(tensors)
    return [(t, i, 0) for i, t in enumerate(items)], len(items), 1


def render_svg(
    tensors: Union[Sequence[DiffusionTensor], TensorField],
    coloring: AnisoIndexKind = AnisoIndexKind.HA,
    path: Optional[PathLike] = None,
    slice_index: int = 0,
    title: Optional[str] = None,
) -> str:
    """Render one ellipse glyph per tensor and return the SVG document.

    A sequence is drawn as one row; a field draws the z = ``slice_index``
    slice with y pointing up. The document is written to ``path`` when given.
    """
    coloring = AnisoIndexKind(coloring)
    if coloring not in COLORINGS:
        raise ValueError(f"glyphs are coloured by HA or FA, got {coloring.value}")
    cells, columns, rows = _layout(tensors, slice_index)
    if not cells:
        raise ValueError("nothing to render")

    glyphs = []
    for tensor, col, row in cells:
        rx, ry, angle = _glyph_axes(tensor)
        index = classical_index(coloring, tensor.eigenvalues())
        glyphs.append((col, row, rx, ry, angle, index))
    finite = [g[5] for g in glyphs if math.isfinite(g[5])]
    vmax = 1.0 if coloring is AnisoIndexKind.FA else max(finite, default=0.0)
    scale = GLYPH_FILL * CELL_SIZE / max(g[2] for g in glyphs)

    width, height = columns * CELL_SIZE, rows * CELL_SIZE
    root = etree.Element(svg_ns("svg"), nsmap=SVG_NS)
    root.set("version", "1.1")
    root.set("width", _fmt(width))
    root.set("height", _fmt(height))
    root.set("viewBox", "0 0 %s %s" % (_fmt(width), _fmt(height)))
    etree.SubElement(root, svg_ns("title")).text = title or "tensor glyphs"
    etree.SubElement(root, svg_ns("desc")).text = (
        "fill: %s from 0 (#ffff00) to %s (#ff0000); glyph: xy projection of the "
        "diffusion ellipsoid, semi-axes scaled by %s"
        % (coloring.value, format(vmax, ".17g"), _fmt(scale))
    )
    group = etree.SubElement(root, svg_ns("g"))
    group.set("stroke", "#000000")
    group.set("stroke-width", "0.5")

    for col, row, rx, ry, angle, index in glyphs:
        cx = _fmt((col + 0.5) * CELL_SIZE)
        cy = _fmt((row + 0.5) * CELL_SIZE)
        attrs = {"fill": _color(index, vmax)}
        if abs(rx - ry) <= CIRCLE_TOLERANCE * rx:
            attrs.update({"cx": cx, "cy": cy, "r": _fmt(rx * scale)})
            etree.SubElement(group, svg_ns("circle"), attrs)
        else:
            attrs.update(
                {
                    "cx": cx,
                    "cy": cy,
                    "rx": _fmt(rx * scale),
                    "ry": _fmt(ry * scale),
                    # SVG y points down
                    "transform": "rotate(%s %s %s)" % (_fmt(-angle), cx, cy),
                }
            )
            etree.SubElement(group, svg_ns("ellipse"), attrs)

    document = etree.tostring(
        root, pretty_print=True, xml_declaration=True, encoding="UTF-8", standalone=False
    )
    if path is not None:
        Path(path).write_bytes(document)
        logger.info("wrote %d glyphs to %s", len(glyphs), path)
    return document.decode("utf-8")


def render_crossing_means(
    sq_path: PathLike,
    le_path: PathLike,
    s1: DiffusionTensor,
    s2: DiffusionTensor,
    p: KParams = DEFAULT_K_PARAMS,
    coloring: AnisoIndexKind = AnisoIndexKind.HA,
) -> Tuple[DiffusionTensor, DiffusionTensor]:
    """Render (S1, mean, S2) for the spectral-quaternion and Log-Euclidean means.

    Returns the two midpoint means.
    """
    f1, f2 = spectral_decompose(s1), spectral_decompose(s2)
    sq_mean = compose(mean_pair(f1, f2, 0.5, 0.5, p))
    le_mean = mean_log_euclidean(WeightedTensorSet((f1, f2), (0.5, 0.5)))
    render_svg([s1, sq_mean, s2], coloring, sq_path, title="spectral-quaternion mean")
    render_svg([s1, le_mean, s2], coloring, le_path, title="Log-Euclidean mean")
    return sq_mean, le_mean
