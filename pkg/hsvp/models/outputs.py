"""Output models: covers, predictions and evaluation rows."""

from typing import Dict, FrozenSet, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hsvp.models.inputs import Budgets

MASS_SLACK = 1e-9
# Set masses this close to the maximum count as tied.
TIE_TOLERANCE = 1e-12


class Cover(BaseModel):
    """A set of pairwise-disjoint hierarchy nodes representing a class set."""

    model_config = ConfigDict(frozen=True)

    nodes: FrozenSet[int] = Field(..., description="Covering node ids")
    complexity: int = Field(..., ge=1, description="Number of nodes")

    @model_validator(mode="after")
    def validate_complexity(self):
        """Complexity is the number of nodes."""
        if self.complexity != len(self.nodes):
            raise ValueError(
                f"complexity ({self.complexity}) must equal node count ({len(self.nodes)})"
            )
        return self


class Prediction(BaseModel):
    """Solver output for one instance."""

    model_config = ConfigDict(frozen=True)

    solver: str = Field(..., description="Solver that produced the prediction")
    budgets: Budgets = Field(..., description="Budgets the prediction satisfies")
    classes: FrozenSet[int] = Field(..., min_length=1, description="Predicted set")
    mass: float = Field(..., ge=0.0, le=1.0 + MASS_SLACK, description="P(set|x)")
    n: int = Field(..., ge=0, description="Solver-specific complexity counter")
    time_us: float = Field(default=0.0, ge=0.0, description="Solve time in us")
    nodes: Tuple[int, ...] = Field(
        default=(), description="Hierarchy nodes representing the set, if known"
    )
    diagnostics: Dict[str, int] = Field(
        default_factory=dict, description="Extra solver counters"
    )

    @model_validator(mode="after")
    def validate_size_budget(self):
        """The predicted set respects the size budget."""
        if len(self.classes) > self.budgets.k:
            raise ValueError(
                f"set of size {len(self.classes)} violates k={self.budgets.k}"
            )
        if self.nodes and len(self.nodes) > self.budgets.r:
            raise ValueError(
                f"{len(self.nodes)} nodes violate r={self.budgets.r}"
            )
        return self

    def sorted_classes(self) -> list[int]:
        """Predicted classes in ascending order."""
        return sorted(self.classes)

    def to_record(self, instance_id: str, timing: bool = True) -> Dict[str, object]:
        """JSON Lines record for the CLI.

        Args:
            instance_id: Identifier of the solved instance
            timing: When False, time_us is reported as 0 for reproducible output

        Returns:
            Ordered record
        """
        return {
            "instance_id": instance_id,
            "solver": self.solver,
            "r": self.budgets.r,
            "k": self.budgets.k,
            "set": self.sorted_classes(),
            "mass": round(self.mass, 12),
            "n": self.n,
            "time_us": round(self.time_us, 3) if timing else 0,
        }


class MetricsRow(BaseModel):
    """Aggregated quality and cost of one solver at one (r, k) cell."""

    solver: str = Field(..., description="Solver tag")
    r: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    recall: Optional[float] = Field(
        default=None, ge=0.0, le=1.0, description="Fraction of hits; None if no labels"
    )
    avg_set_size: float = Field(..., ge=1.0, description="Mean predicted set size")
    avg_time_us: float = Field(..., ge=0.0, description="Mean solve time in us")
    avg_n: float = Field(..., ge=0.0, description="Mean complexity counter")
    instances: int = Field(..., ge=1, description="Number of evaluated instances")
