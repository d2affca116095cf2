"""Configuration module for tutte-atlas."""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int, minimum: int = 0) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, repr(default))
    try:
        value = float(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be a number, got {raw!r}") from e
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@dataclass
class OracleConfig:
    """Configuration for the deletion-contraction oracle."""

    max_edges: int

    @classmethod
    def from_env(cls) -> "OracleConfig":
        """Load configuration from environment variables."""
        return cls(max_edges=_env_int("TUTTE_ATLAS_MAX_EDGES", 64, minimum=1))


@dataclass
class EigenConfig:
    """Configuration for dominance classification."""

    tie_tolerance: float

    @classmethod
    def from_env(cls) -> "EigenConfig":
        """Load configuration from environment variables."""
        return cls(tie_tolerance=_env_float("TUTTE_ATLAS_TIE_TOLERANCE", 1e-9))


@dataclass
class RootConfig:
    """Configuration for the simultaneous root iteration."""

    max_sweeps: int
    cluster_tolerance: float
    seed: int | None

    @classmethod
    def from_env(cls) -> "RootConfig":
        """Load configuration from environment variables."""
        seed_str = os.getenv("TUTTE_ATLAS_SEED")
        seed = _env_int("TUTTE_ATLAS_SEED", 0) if seed_str else None

        return cls(
            max_sweeps=_env_int("TUTTE_ATLAS_MAX_SWEEPS", 1000, minimum=1),
            cluster_tolerance=_env_float("TUTTE_ATLAS_CLUSTER_TOLERANCE", 1e-7),
            seed=seed,
        )


@dataclass
class SamplingConfig:
    """Configuration for curve sampling."""

    min_samples: int
    max_imag: float

    @classmethod
    def from_env(cls) -> "SamplingConfig":
        """Load configuration from environment variables."""
        return cls(
            min_samples=_env_int("TUTTE_ATLAS_MIN_SAMPLES", 256, minimum=8),
            max_imag=_env_float("TUTTE_ATLAS_MAX_IMAG", 50.0),
        )


@dataclass
class RuntimeConfig:
    """Configuration for parallelism and logging."""

    threads: int
    log_level: str
    log_file: str | None

    @classmethod
    def from_env(cls) -> "RuntimeConfig":
        """Load configuration from environment variables."""
        threads = _env_int("TUTTE_ATLAS_THREADS", os.cpu_count() or 1, minimum=1)
        log_level = os.getenv("TUTTE_ATLAS_LOG_LEVEL", "INFO").upper()
        log_file = os.getenv("TUTTE_ATLAS_LOG_FILE") or None

        return cls(threads=threads, log_level=log_level, log_file=log_file)


@dataclass
class Config:
    """Main configuration container."""

    oracle: OracleConfig
    eigen: EigenConfig
    roots: RootConfig
    sampling: SamplingConfig
    runtime: RuntimeConfig

    @classmethod
    def load(cls) -> "Config":
        """Load all configurations."""
        return cls(
            oracle=OracleConfig.from_env(),
            eigen=EigenConfig.from_env(),
            roots=RootConfig.from_env(),
            sampling=SamplingConfig.from_env(),
            runtime=RuntimeConfig.from_env(),
        )
