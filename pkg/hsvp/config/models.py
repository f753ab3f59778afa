"""Configuration models using Pydantic."""

from pydantic import BaseModel, Field, field_validator


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = Field(default="INFO", description="Logging level")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string",
    )

    @field_validator("level")
    @classmethod
    def validate_log_level(cls, v):
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v.upper()


class SolverConfig(BaseModel):
    """Size guards and tolerances for the solvers."""

    enum_guard: int = Field(
        default=10_000_000, ge=1, description="Maximum number of feasible sets"
    )
    mvm_max_cells: int = Field(
        default=25_000_000,
        ge=1,
        description="Maximum cells of the dense MVM incidence matrix",
    )
    oracle_max_classes: int = Field(
        default=16, ge=1, le=24, description="Largest K for the exhaustive oracle"
    )
    cover_oracle_max_nodes: int = Field(
        default=24, ge=1, description="Largest M for the exhaustive cover search"
    )
    complexity_class_max_classes: int = Field(
        default=12, ge=1, description="Largest K for complexity class enumeration"
    )
    renormalize_tolerance: float = Field(
        default=1e-6,
        gt=0,
        description="Largest normalization error fixed by renormalizing",
    )
    agreement_tolerance: float = Field(
        default=1e-9, gt=0, description="Mass tolerance for cross-solver checks"
    )

    def mvm_row_guard(self, class_count: int) -> int:
        """Row limit for the MVM matrix of a K-class hierarchy."""
        return min(self.enum_guard, max(1, self.mvm_max_cells // class_count))


class RunnerConfig(BaseModel):
    """Batch runner configuration."""

    workers: int = Field(default=1, ge=1, description="Concurrent workers")
    warmup: int = Field(
        default=1, ge=0, description="Untimed warm-up solves per bench cell"
    )


class MetricsConfig(BaseModel):
    """Metrics configuration."""

    enabled: bool = Field(default=True, description="Enable metrics collection")


class TracingConfig(BaseModel):
    """Tracing configuration."""

    enabled: bool = Field(default=False, description="Install a tracer provider")
    console: bool = Field(
        default=False, description="Export finished spans to stderr"
    )


class HsvpConfig(BaseModel):
    """Main configuration."""

    version: str = Field(default="0.1.0", description="Application version")
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    runner: RunnerConfig = Field(default_factory=RunnerConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    tracing: TracingConfig = Field(default_factory=TracingConfig)
