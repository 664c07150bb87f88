"""
MCP server exposing the tensor library as tools.
"""

import json
import logging
from typing import Any, Dict, List, Optional

from fastmcp import FastMCP
from pydantic import BaseModel, Field

from . import __version__
from .anisotropy import all_indices
from .config import Config
from .fields import curve_diagnostics, interp_curve
from .means import WeightedTensorSet, weighted_mean
from .metrics import MetricKind, distance
from .tensor import spectral_decompose, validate_spd

logger = logging.getLogger(__name__)

TensorComponents = List[float]

COMPONENTS_DESCRIPTION = "Six tensor components (dxx, dxy, dxz, dyy, dyz, dzz)"


# Pydantic models for tool parameters
class DistanceArgs(BaseModel):
    """Arguments for the distance between two tensors."""

    a: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)
    b: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)
    metric: MetricKind = Field(
        MetricKind.SPECTRAL_QUATERNION, description="ai, le, spectral-rot or sq"
    )


class MeanArgs(BaseModel):
    """Arguments for the weighted mean of tensors."""

    tensors: List[TensorComponents] = Field(..., description="Tensors, six components each")
    weights: Optional[List[float]] = Field(
        None, description="Weights summing to 1 (default: uniform)"
    )
    metric: MetricKind = Field(MetricKind.SPECTRAL_QUATERNION, description="sq, le or ai")


class AnisotropyArgs(BaseModel):
    """Arguments for the anisotropy indices of one tensor."""

    tensor: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)


class InterpolateArgs(BaseModel):
    """Arguments for the interpolation curve between two tensors."""

    a: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)
    b: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)
    steps: int = Field(11, ge=2, le=1001, description="Number of samples, endpoints included")
    metric: MetricKind = Field(MetricKind.SPECTRAL_QUATERNION, description="sq, le or ai")


class SpectralDecomposeArgs(BaseModel):
    """Arguments for the spectral decomposition of one tensor."""

    tensor: TensorComponents = Field(..., description=COMPONENTS_DESCRIPTION)


class SpectralTensorMCPServer:
    """MCP server for diffusion tensor computations."""

    def __init__(self, config: Config) -> None:
        self.config = config
        self.params = config.runtime.k_params()
        self.app = FastMCP(name="Spectral Tensor MCP Server", version=__version__)

        # Register tools
        self._register_tools()

    def distance(self, args: DistanceArgs) -> Dict[str, Any]:
        s1, s2 = validate_spd(args.a), validate_spd(args.b)
        return {"metric": args.metric.value, "distance": distance(args.metric, s1, s2, self.params)}

    def mean(self, args: MeanArgs) -> Dict[str, Any]:
        tensors = [validate_spd(t) for t in args.tensors]
        if args.weights is None:
            tensor_set = WeightedTensorSet.uniform(tensors)
        else:
            tensor_set = WeightedTensorSet.from_tensors(tensors, args.weights)
        result = weighted_mean(args.metric, tensor_set, self.params)
        return {"metric": args.metric.value, "mean": list(result.components())}

    def anisotropy(self, args: AnisotropyArgs) -> Dict[str, Any]:
        tensor = validate_spd(args.tensor)
        return {"eigenvalues": list(tensor.eigenvalues()), **all_indices(tensor.eigenvalues())}

    def interpolate(self, args: InterpolateArgs) -> Dict[str, Any]:
        f1 = spectral_decompose(validate_spd(args.a))
        f2 = spectral_decompose(validate_spd(args.b))
        samples = interp_curve(f1, f2, args.steps, args.metric, self.params)
        return {
            "metric": args.metric.value,
            "samples": [
                {"tensor": list(s.components()), **row._asdict()}
                for s, row in zip(samples, curve_diagnostics(samples))
            ],
        }

    def spectral_decompose(self, args: SpectralDecomposeArgs) -> Dict[str, Any]:
        form = spectral_decompose(validate_spd(args.tensor))
        return {"eigenvalues": list(form.eigenvalues), "quaternion": list(form.q.as_tuple())}

    def _reply(self, payload: Dict[str, Any]) -> List[Dict[str, str]]:
        return [{"type": "text", "text": self._safe_truncate(json.dumps(payload, indent=2))}]

    def _register_tools(self) -> None:
        """Register all available tools."""

        if "DistanceTool" not in self.config.server.disabled_tools:

            @self.app.tool(
                name="DistanceTool",
                description="Distance between two diffusion tensors under the affine-invariant (ai), Log-Euclidean (le), spectral rotation-matrix (spectral-rot) or spectral-quaternion (sq) measure. Tensors are given as six components in 'args'.",
            )
            async def distance_tool(args: DistanceArgs):
                """Return the distance between tensors 'a' and 'b'.

                Example usage:
                    {"args": {"a": [2, 0, 0, 1, 0, 0.5], "b": [1, 0, 0, 1, 0, 1], "metric": "sq"}}
                """
                try:
                    return self._reply(self.distance(args))
                except Exception as e:
                    logger.error("Failed to compute distance: %s", e)
                    return [{"type": "text", "text": f"Error computing distance: {str(e)}"}]

        if "MeanTool" not in self.config.server.disabled_tools:

            @self.app.tool(
                name="MeanTool",
                description="Weighted mean of diffusion tensors. The spectral-quaternion mean (sq) preserves the weighted average of the Hilbert anisotropy; le and ai are the Log-Euclidean and affine-invariant means.",
            )
            async def mean_tool(args: MeanArgs):
                """Return the weighted mean of 'tensors'.

                Example usage:
                    {"args": {"tensors": [[2, 0, 0, 1, 0, 0.5], [1, 0, 0, 2, 0, 0.5]]}}
                    {"args": {"tensors": [...], "weights": [0.25, 0.75], "metric": "le"}}
                """
                try:
                    return self._reply(self.mean(args))
                except Exception as e:
                    logger.error("Failed to compute mean: %s", e)
                    return [{"type": "text", "text": f"Error computing mean: {str(e)}"}]

        if "AnisotropyTool" not in self.config.server.disabled_tools:

            @self.app.tool(
                name="AnisotropyTool",
                description="Hilbert (HA), fractional (FA), relative (RA) and geodesic (GA) anisotropy of one diffusion tensor.",
            )
            async def anisotropy_tool(args: AnisotropyArgs):
                """Return the eigenvalues and anisotropy indices of 'tensor'."""
                try:
                    return self._reply(self.anisotropy(args))
                except Exception as e:
                    logger.error("Failed to compute anisotropy: %s", e)
                    return [{"type": "text", "text": f"Error computing anisotropy: {str(e)}"}]

        if "InterpolateTool" not in self.config.server.disabled_tools:

            @self.app.tool(
                name="InterpolateTool",
                description="Samples of the interpolation curve between two tensors (sq, le or ai), with HA, FA, determinant and principal-axis angle per sample.",
            )
            async def interpolate_tool(args: InterpolateArgs):
                """Return 'steps' samples from 'a' to 'b'."""
                try:
                    return self._reply(self.interpolate(args))
                except Exception as e:
                    logger.error("Failed to interpolate: %s", e)
                    return [{"type": "text", "text": f"Error interpolating: {str(e)}"}]

        if "SpectralDecomposeTool" not in self.config.server.disabled_tools:

            @self.app.tool(
                name="SpectralDecomposeTool",
                description="Descending eigenvalues and canonical orientation quaternion (a, v1, v2, v3) of one diffusion tensor.",
            )
            async def spectral_decompose_tool(args: SpectralDecomposeArgs):
                """Return the spectral form of 'tensor'."""
                try:
                    return self._reply(self.spectral_decompose(args))
                except Exception as e:
                    logger.error("Failed to decompose tensor: %s", e)
                    return [{"type": "text", "text": f"Error decomposing tensor: {str(e)}"}]

    def _safe_truncate(self, text: str, max_length: int = 32000) -> str:
        """Truncate text to avoid overwhelming the client."""
        if len(text) <= max_length:
            return text
        return text[:max_length] + f"\n\n[... truncated {len(text) - max_length} characters ...]"

    def start(self, host: Optional[str] = None, port: Optional[int] = None) -> None:
        """Start the MCP server."""
        import uvicorn

        host = host or self.config.server.host
        port = port or self.config.server.port

        logger.info("Starting Spectral Tensor MCP Server on %s:%d", host, port)
        logger.info("k parameters: slope=%s offset=%s", self.params.slope, self.params.offset)

        # Start server with SSE transport
        uvicorn.run(
            self.app.http_app(transport="sse"),
            host=host,
            port=port,
            log_level=self.config.runtime.log_level.lower(),
        )


def create_server(config: Optional[Config] = None) -> SpectralTensorMCPServer:
    """Factory function to create a SpectralTensorMCPServer instance."""
    if config is None:
        config = Config.from_env()

    config.validate()
    config.setup_logging()

    return SpectralTensorMCPServer(config)
