"""
Main CLI entry point for spectral-tensor.
"""

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Callable, Iterable, List, NoReturn, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

from . import __version__
from .anisotropy import (
    AnisoIndexKind,
    all_indices,
    aniso_sweep,
    fractional_anisotropy,
    hilbert_anisotropy,
)
from .bench import SWEEP_HEADER, SweepMode, bench_distances, cigar_pair, sweep_distances
from .config import LOG_LEVELS, Config
from .exceptions import SpectralTensorError
from .fields import (
    FIELD_MAGIC,
    TEXT_HEADER,
    curve_diagnostics,
    interp_curve,
    interpolate_grid,
    read_field,
    read_tensors,
    resample_field,
    write_field,
)
from .means import WeightedTensorSet, weighted_mean
from .metrics import KParams, MetricKind, distance
from .render import render_crossing_means, render_svg
from .tensor import DiffusionTensor, TensorField, spectral_decompose

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

COMPONENT_HEADER = ("dxx", "dxy", "dxz", "dyy", "dyz", "dzz")
FORMATS = ("csv", "json", "dtf", "svg")


class CliParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value: float) -> str:
    """17 significant digits, enough to reproduce any double."""
    return format(float(value), ".17g")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _dims(text: str) -> List[int]:
    try:
        dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected nx,ny,nz, got {text!r}")
    if len(dims) != 3 or any(d <= 0 for d in dims):
        raise argparse.ArgumentTypeError(f"expected three positive dims, got {text!r}")
    return dims


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--metric",
        choices=[m.value for m in MetricKind],
        default=MetricKind.SPECTRAL_QUATERNION.value,
        help="Similarity measure or mean framework (default: sq)",
    )
    common.add_argument(
        "--k-slope",
        type=float,
        help="Slope of the orientation weight k (overrides SPECTRAL_TENSOR_K_SLOPE)",
    )
    common.add_argument(
        "--k-offset",
        type=float,
        help="Offset of the orientation weight k (overrides SPECTRAL_TENSOR_K_OFFSET)",
    )
    common.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    common.add_argument("--out", help="Output file (default: standard output)")
    common.add_argument("--format", choices=FORMATS, help="Output format")
    common.add_argument(
        "--log-level",
        choices=list(LOG_LEVELS),
        help="Logging level (overrides LOG_LEVEL)",
    )
    common.add_argument(
        "--threads",
        type=int,
        help="Worker threads for resampling (overrides SPECTRAL_TENSOR_THREADS)",
    )
    return common


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser for CLI."""
    parser = CliParser(
        prog="spectral-tensor",
        description="Spectral-quaternion distances, means and interpolation of diffusion tensors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    common = _common_parser()

    p = sub.add_parser("dist", parents=[common], help="Distance between two tensors")
    p.add_argument("a", help="File holding the first tensor")
    p.add_argument("b", help="File holding the second tensor")
    p.set_defaults(handler=cmd_dist, parser=p)

    p = sub.add_parser("mean", parents=[common], help="Weighted mean of tensors")
    p.add_argument("files", nargs="+", help="Tensor files; every tensor they hold is averaged")
    p.add_argument("--weights", type=_float_list, help="Comma-separated weights (default: uniform)")
    p.set_defaults(handler=cmd_mean, parser=p)

    p = sub.add_parser("interp", parents=[common], help="Interpolation curve between two tensors")
    p.add_argument("a", help="File holding the first tensor")
    p.add_argument("b", help="File holding the second tensor")
    p.add_argument(
        "--steps", type=int, default=11, help="Samples, endpoints included (default: 11)"
    )
    p.set_defaults(handler=cmd_interp, parser=p)

    p = sub.add_parser(
        "grid-interp", parents=[common], help="Interpolation inside a 4 or 8 corner cell"
    )
    p.add_argument("corners", help="File holding 4 or 8 corner tensors, x fastest")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--point", type=_float_list, help="Sample point x,y[,z] in the unit cell")
    group.add_argument("--grid", type=int, help="Samples per axis over the whole cell")
    p.set_defaults(handler=cmd_grid_interp, parser=p)

    p = sub.add_parser("resample", parents=[common], help="Resample a tensor field")
    p.add_argument("field", help="Input field (DTF1 or dtf-text)")
    p.add_argument("--dims", type=_dims, required=True, help="Output dims nx,ny,nz")
    p.set_defaults(handler=cmd_resample, parser=p)

    p = sub.add_parser("aniso", parents=[common], help="Anisotropy indices of tensors")
    p.add_argument("file", help="Tensor file")
    p.set_defaults(handler=cmd_aniso, parser=p)

    p = sub.add_parser(
        "aniso-sweep", parents=[common], help="Indices from planar to linear tensors"
    )
    p.add_argument("--steps", type=int, default=100, help="Rows (default: 100)")
    p.set_defaults(handler=cmd_aniso_sweep, parser=p)

    p = sub.add_parser("sweep", parents=[common], help="Distances along a tensor sweep")
    p.add_argument(
        "--mode",
        choices=[m.value for m in SweepMode],
        default=SweepMode.EIGENVALUES.value,
        help="Swept quantity (default: eigenvalues)",
    )
    p.add_argument("--steps", type=int, default=41, help="Rows (default: 41)")
    p.set_defaults(handler=cmd_sweep, parser=p)

    p = sub.add_parser("bench", parents=[common], help="Time n distances per metric")
    p.add_argument("--n", type=int, default=1000, help="Distances per metric (default: 1000)")
    p.add_argument("--dof", type=int, default=5, help="Wishart degrees of freedom (default: 5)")
    p.set_defaults(handler=cmd_bench, parser=p)

    p = sub.add_parser("render", parents=[common], help="SVG glyphs of tensors")
    p.add_argument("file", nargs="?", help="Tensor list or field file")
    p.add_argument("--coloring", choices=["HA", "FA"], default="HA", help="Glyph colour index")
    p.add_argument("--slice", type=int, default=0, help="z slice of a field (default: 0)")
    p.add_argument("--demo", choices=["fig1"], help="Render the crossed-cigar means instead")
    p.add_argument("--angle", type=float, default=60.0, help="Crossing angle for --demo (degrees)")
    p.set_defaults(handler=cmd_render, parser=p)

    p = sub.add_parser("serve", parents=[common], help="Run the MCP server")
    p.add_argument("--host", help="Host to bind server to (overrides MCP_SERVER_HOST)")
    p.add_argument("--port", type=int, help="Port to bind server to (overrides MCP_SERVER_PORT)")
    p.set_defaults(handler=cmd_serve, parser=p)

    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, int)) else v for v in row])
    return buffer.getvalue()


# a NUL-prefixed index stands in for each float until the text is assembled
_FLOAT_SLOT = re.compile(r'"\\u0000(\d+)"')


def _json(payload: Any) -> str:
    """Indented JSON with every finite float written by ``fmt``."""
    numbers: List[str] = []

    def slot(value: Any) -> Any:
        if isinstance(value, dict):
            return {k: slot(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [slot(v) for v in value]
        if isinstance(value, float) and math.isfinite(value):
            numbers.append(fmt(value))
            return f"\0{len(numbers) - 1}"
        return value

    text = json.dumps(slot(payload), indent=2)
    return _FLOAT_SLOT.sub(lambda m: numbers[int(m.group(1))], text) + "\n"


def _single(path: str) -> DiffusionTensor:
    tensors = read_tensors(path)
    if len(tensors) > 1:
        logger.warning("%s holds %d tensors, using the first", path, len(tensors))
    return tensors[0]


def _write_tensors(
    args: argparse.Namespace, tensors: List[DiffusionTensor], dims: Sequence[int]
) -> None:
    if not args.out:
        raise SpectralTensorError("--format dtf needs --out")
    field = TensorField(tuple(dims), (1.0, 1.0, 1.0), tuple(tensors))  # type: ignore[arg-type]
    write_field(field, args.out)


def _require(args: argparse.Namespace, allowed: Sequence[str], default: str) -> str:
    chosen = args.format or default
    if chosen not in allowed:
        args.parser.error(f"--format {chosen} is not available for {args.command}")
    return str(chosen)


def cmd_dist(args: argparse.Namespace, params: KParams, config: Config) -> int:
    value = distance(MetricKind(args.metric), _single(args.a), _single(args.b), params)
    if _require(args, ("csv", "json"), "csv") == "json":
        _emit(_json({"metric": args.metric, "distance": value}), args.out)
    else:
        _emit(fmt(value) + "\n", args.out)
    return EXIT_OK


def cmd_mean(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json", "dtf"), "csv")
    tensors = [t for path in args.files for t in read_tensors(path)]
    if args.weights is None:
        tensor_set = WeightedTensorSet.uniform(tensors)
    else:
        tensor_set = WeightedTensorSet.from_tensors(tensors, args.weights)
    result = weighted_mean(MetricKind(args.metric), tensor_set, params)
    if fmt_name == "json":
        _emit(_json({"metric": args.metric, "mean": list(result.components())}), args.out)
    elif fmt_name == "dtf":
        _write_tensors(args, [result], (1, 1, 1))
    else:
        _emit(_csv(COMPONENT_HEADER, [result.components()]), args.out)
    return EXIT_OK


def cmd_interp(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json", "dtf"), "csv")
    f1, f2 = spectral_decompose(_single(args.a)), spectral_decompose(_single(args.b))
    samples = interp_curve(f1, f2, args.steps, MetricKind(args.metric), params)
    rows = curve_diagnostics(samples)
    if fmt_name == "dtf":
        _write_tensors(args, samples, (len(samples), 1, 1))
    elif fmt_name == "json":
        payload = [{**r._asdict(), "tensor": list(s.components())} for s, r in zip(samples, rows)]
        _emit(_json(payload), args.out)
    else:
        header = ("t", "HA", "FA", "det", "phi") + COMPONENT_HEADER
        _emit(_csv(header, [tuple(r) + s.components() for s, r in zip(samples, rows)]), args.out)
    return EXIT_OK


def cmd_grid_interp(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json", "dtf"), "csv")
    corners = [spectral_decompose(t) for t in read_tensors(args.corners)]
    if len(corners) not in (4, 8):
        raise SpectralTensorError(f"a cell has 4 or 8 corners, {args.corners} holds {len(corners)}")
    metric = MetricKind(args.metric)

    if args.point is not None:
        points = [list(args.point) + [0.0] * (3 - len(args.point))]
        dims = [1, 1, 1]
    else:
        if args.grid < 2:
            args.parser.error("--grid needs at least 2 samples per axis")
        axis = [i / (args.grid - 1) for i in range(args.grid)]
        nz = args.grid if len(corners) == 8 else 1
        zs = axis if nz > 1 else [0.0]
        points = [[x, y, z] for z in zs for y in axis for x in axis]
        dims = [args.grid, args.grid, nz]

    tensors = [interpolate_grid(corners, pt, metric, params) for pt in points]
    if fmt_name == "dtf":
        _write_tensors(args, tensors, dims)
        return EXIT_OK
    rows = []
    for pt, t in zip(points, tensors):
        f = spectral_decompose(t)
        ha = hilbert_anisotropy(f.eigenvalues)
        fa = fractional_anisotropy(np.array(f.eigenvalues))
        rows.append((pt[0], pt[1], pt[2], ha, fa, f.determinant()) + t.components())
    header = ("x", "y", "z", "HA", "FA", "det") + COMPONENT_HEADER
    if fmt_name == "json":
        _emit(_json([dict(zip(header, row)) for row in rows]), args.out)
    else:
        _emit(_csv(header, rows), args.out)
    return EXIT_OK


def cmd_resample(args: argparse.Namespace, params: KParams, config: Config) -> int:
    _require(args, ("dtf",), "dtf")
    if not args.out:
        args.parser.error("resample needs --out")
    field = read_field(args.field)
    result = resample_field(
        field, tuple(args.dims), MetricKind(args.metric), params, config.runtime.threads
    )
    write_field(result, args.out)
    logger.info("resampled %s -> %s into %s", field.dims, result.dims, args.out)
    return EXIT_OK


def cmd_aniso(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json"), "csv")
    rows = [all_indices(t.eigenvalues()) for t in read_tensors(args.file)]
    if fmt_name == "json":
        _emit(_json(rows), args.out)
    else:
        header = [k.value for k in AnisoIndexKind]
        _emit(_csv(header, [[r[h] for h in header] for r in rows]), args.out)
    return EXIT_OK


def cmd_aniso_sweep(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json"), "csv")
    rows = aniso_sweep(args.steps)
    if fmt_name == "json":
        _emit(_json([r._asdict() for r in rows]), args.out)
    else:
        _emit(_csv(("t", "HA", "FA", "RA", "GA"), rows), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json"), "csv")
    rows = sweep_distances(SweepMode(args.mode), args.steps, params)
    if fmt_name == "json":
        _emit(_json([dict(zip(SWEEP_HEADER, r)) for r in rows]), args.out)
    else:
        _emit(_csv(SWEEP_HEADER, rows), args.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, params: KParams, config: Config) -> int:
    fmt_name = _require(args, ("csv", "json"), "json")
    report = bench_distances(args.seed, args.n, args.dof, params)
    if fmt_name == "json":
        _emit(_json(report.model_dump()), args.out)
    else:
        _emit(_csv(("metric", "seconds"), sorted(report.times.items())), args.out)
    return EXIT_OK


def cmd_render(args: argparse.Namespace, params: KParams, config: Config) -> int:
    _require(args, ("svg",), "svg")
    coloring = AnisoIndexKind(args.coloring)
    if args.demo:
        prefix = Path(args.out or "fig1")
        stem = prefix.with_suffix("") if prefix.suffix == ".svg" else prefix
        sq_path = stem.with_name(stem.name + "-sq.svg")
        le_path = stem.with_name(stem.name + "-le.svg")
        s1, s2 = cigar_pair(args.angle)
        sq_mean, le_mean = render_crossing_means(sq_path, le_path, s1, s2, params, coloring)
        _emit(
            _csv(
                ("framework", "path", "HA"),
                [
                    ("sq", str(sq_path), hilbert_anisotropy(sq_mean.eigenvalues())),
                    ("le", str(le_path), hilbert_anisotropy(le_mean.eigenvalues())),
                ],
            ),
            None,
        )
        return EXIT_OK

    if not args.file:
        args.parser.error("render needs a tensor file or --demo")
    head = Path(args.file).read_bytes()[: len(TEXT_HEADER)]
    if head.startswith(FIELD_MAGIC) or head.startswith(TEXT_HEADER.encode("ascii")):
        source: Any = read_field(args.file)
    else:
        source = read_tensors(args.file)
    document = render_svg(source, coloring, args.out, slice_index=args.slice)
    if not args.out:
        sys.stdout.write(document)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, params: KParams, config: Config) -> int:
    from .server import SpectralTensorMCPServer

    server = SpectralTensorMCPServer(config)
    try:
        server.start(host=args.host, port=args.port)
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    handler: Callable[[argparse.Namespace, KParams, Config], int] = args.handler
    try:
        # Create config from environment
        config = Config.from_env()

        # Override with CLI arguments
        if args.k_slope is not None:
            config.runtime.k_slope = args.k_slope
        if args.k_offset is not None:
            config.runtime.k_offset = args.k_offset
        if args.threads is not None:
            config.runtime.threads = args.threads
        if args.log_level:
            config.runtime.log_level = args.log_level
        if args.command == "serve":
            if args.host:
                config.server.host = args.host
            if args.port:
                config.server.port = args.port

        config.validate()
        config.setup_logging()
        return handler(args, config.runtime.k_params(), config)

    except SystemExit as e:
        return int(e.code or 0)
    except (SpectralTensorError, OSError, ValueError) as e:
        logger.debug("%s failed", args.command, exc_info=True)
        sys.stderr.write(f"spectral-tensor {args.command}: error: {e}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
