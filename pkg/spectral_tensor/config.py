"""
Configuration management for spectral-tensor.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import List

from .exceptions import ConfigurationError
from .metrics import KParams

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_number(name: str, default: str, kind: type) -> float:
    raw = os.getenv(name, default)
    try:
        return kind(raw)  # type: ignore[no-any-return]
    except ValueError as e:
        raise ConfigurationError(f"{name}={raw!r} is not a valid {kind.__name__}") from e


@dataclass
class RuntimeConfig:
    """Numerical settings shared by the CLI and the server."""

    k_slope: float = 3.0
    k_offset: float = 7.0
    threads: int = 1
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "RuntimeConfig":
        """Create configuration from environment variables."""
        return cls(
            k_slope=_env_number("SPECTRAL_TENSOR_K_SLOPE", "3.0", float),
            k_offset=_env_number("SPECTRAL_TENSOR_K_OFFSET", "7.0", float),
            threads=int(_env_number("SPECTRAL_TENSOR_THREADS", "1", int)),
            log_level=os.getenv("LOG_LEVEL", "INFO"),
        )

    def validate(self) -> None:
        """Validate configuration."""
        if not self.k_slope > 0.0:
            raise ConfigurationError(f"k slope must be positive, got {self.k_slope}")
        if not self.k_offset >= 0.0:
            raise ConfigurationError(f"k offset must be nonnegative, got {self.k_offset}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigurationError(f"unknown log level {self.log_level!r}")

    def k_params(self) -> KParams:
        return KParams(slope=self.k_slope, offset=self.k_offset)


@dataclass
class ServerConfig:
    """Configuration for the MCP server."""

    host: str = "127.0.0.1"
    port: int = 8000
    disabled_tools: List[str] = field(default_factory=list)

    @classmethod
    def from_env(cls) -> "ServerConfig":
        """Create configuration from environment variables."""
        disabled_tools = []
        if tools_str := os.getenv("SPECTRAL_TENSOR_DISABLED_TOOLS"):
            disabled_tools = [tool.strip() for tool in tools_str.split(",") if tool.strip()]

        return cls(
            host=os.getenv("MCP_SERVER_HOST", "127.0.0.1"),
            port=int(_env_number("MCP_SERVER_PORT", "8000", int)),
            disabled_tools=disabled_tools,
        )

    def validate(self) -> None:
        if not 0 < self.port < 65536:
            raise ConfigurationError(f"port must be in 1..65535, got {self.port}")


@dataclass
class Config:
    """Main configuration class."""

    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    server: ServerConfig = field(default_factory=ServerConfig)

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables."""
        return cls(runtime=RuntimeConfig.from_env(), server=ServerConfig.from_env())

    def validate(self) -> None:
        """Validate all configuration."""
        self.runtime.validate()
        self.server.validate()

    def setup_logging(self) -> None:
        """Setup logging configuration."""
        logging.basicConfig(
            level=getattr(logging, self.runtime.log_level.upper()),
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )
