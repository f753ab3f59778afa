"""Input models: prediction budgets and run configuration."""

from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Budgets(BaseModel):
    """Budgets (r, k) constraining a set-valued prediction."""

    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=1, description="Maximum representation complexity")
    k: int = Field(..., ge=1, description="Maximum set size")

    def __str__(self) -> str:
        return f"r={self.r},k={self.k}"


SOLVER_NAMES = ("mvm", "kcg", "rts", "oracle")


class GenConfig(BaseModel):
    """Parameters of a synthetic hierarchy and its probability rows."""

    classes: int = Field(..., ge=2, description="Number of classes K")
    branching: float = Field(default=2.0, ge=2.0, description="Mean branching factor")
    shape: Literal["random", "balanced"] = Field(
        default="random", description="Random splits or near-equal splits"
    )
    alpha: float = Field(default=1.0, gt=0.0, description="Dirichlet concentration")
    instances: int = Field(default=10, ge=1, description="Number of probability rows")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Random seed")
    out_dir: Optional[Path] = Field(default=None, description="Output directory")


class RunConfig(BaseModel):
    """Configuration of one CLI run."""

    solver: str = Field(default="rts", description="Solver name")
    solvers: List[str] = Field(
        default_factory=lambda: list(SOLVER_NAMES),
        description="Solvers compared by check or benchmarked by bench",
    )
    r: List[int] = Field(default_factory=lambda: [1], description="Complexity budgets")
    k: List[int] = Field(default_factory=lambda: [1], description="Size budgets")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Random seed")
    hierarchy: Optional[Path] = Field(default=None, description="Hierarchy file")
    probs: Optional[Path] = Field(default=None, description="Flat probability CSV")
    conds: Optional[Path] = Field(default=None, description="Conditionals file")
    out: Optional[Path] = Field(default=None, description="Output path")
    workers: int = Field(default=1, ge=1, description="Concurrent workers")
    timing: bool = Field(default=True, description="Report measured times")
    gen: Optional[GenConfig] = Field(
        default=None, description="Synthetic data used when no input files are given"
    )

    @field_validator("solver")
    @classmethod
    def validate_solver(cls, v: str) -> str:
        """Validate solver name."""
        if v not in SOLVER_NAMES:
            raise ValueError(f"Solver must be one of: {list(SOLVER_NAMES)}")
        return v

    @field_validator("solvers")
    @classmethod
    def validate_solvers(cls, v: List[str]) -> List[str]:
        """Validate that at least one solver is named, each once."""
        if not v:
            raise ValueError("At least one solver is required")
        if len(set(v)) != len(v):
            raise ValueError(f"Solvers must be distinct, got {v}")
        return v

    @field_validator("r", "k")
    @classmethod
    def validate_budget_list(cls, v: List[int]) -> List[int]:
        """Validate that every budget is a positive integer."""
        if not v:
            raise ValueError("At least one budget value is required")
        if any(b < 1 for b in v):
            raise ValueError(f"Budgets must be >= 1, got {v}")
        return v

    def budgets(self) -> List[Budgets]:
        """Expand the r and k lists into every (r, k) pair, r-major."""
        return [Budgets(r=r, k=k) for r in self.r for k in self.k]

    def has_input(self) -> bool:
        """Whether any distribution file was given."""
        return self.probs is not None or self.conds is not None
