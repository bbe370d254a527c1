"""
Serialisable result models for validation, consistency and scenario runs.
"""
import math
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

History = Tuple[int, ...]

PROBABILITY_SUM_TOL = 1e-10


class ValidationReport(BaseModel):
    """Outcome of checking an operator against a claimed kind."""
    model_config = ConfigDict(frozen=True)

    kind: str = Field(..., description="Kind that was checked")
    passed: bool = Field(..., description="Whether the deviation is within tolerance")
    max_deviation: float = Field(..., description="Largest entrywise deviation found")
    tolerance: float = Field(..., description="Tolerance used")


class ConsistencyReport(BaseModel):
    """Normalised off-diagonal measure of a decoherence matrix."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., gt=0, description="Consistency tolerance")
    max_normalized_offdiag: float = Field(..., description="Largest normalised off-diagonal")
    worst_pair: Optional[Tuple[History, History]] = Field(None, description="Pair achieving the maximum")
    consistent: bool = Field(..., description="Whether the set passes at epsilon")
    history_count: int = Field(..., description="Number of histories in the set")
    set_id: Optional[int] = Field(None, exclude=True, description="Identity of the source history set")


class PosteriorSummary(BaseModel):
    """MAP estimate and credible window of a grid posterior."""
    model_config = ConfigDict(frozen=True)

    map_point: float
    lower: float
    upper: float
    level: float
    mass: float = Field(..., description="Posterior mass inside the window")
    degenerate: bool = False


class ScenarioName(str, Enum):
    """Catalogued scenarios."""
    CANONICAL_OBSERVER = "canonical-observer"
    GAMBLING = "gambling"
    HOURGLASS = "hourglass"
    PREPARATION_DISCRIMINATION = "preparation-discrimination"
    STATE_ESTIMATION = "state-estimation"
    THEORY_DISCRIMINATION = "theory-discrimination"


class ScenarioResult(BaseModel):
    """Structured output of one scenario run."""

    scenario: str = Field(..., description="Scenario name")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Parameters echo")
    probabilities: Dict[str, Dict[str, float]] = Field(
        default_factory=dict, description="Named exact probability tables"
    )
    sampled: Optional[Dict[str, Dict[str, float]]] = Field(
        None, description="Named sampled frequency tables"
    )
    derived: Dict[str, Any] = Field(default_factory=dict, description="Derived quantities and verdicts")
    consistency: List[ConsistencyReport] = Field(default_factory=list)
    seed: int = Field(..., description="Seed used for every random draw")

    @field_validator("probabilities", "sampled")
    @classmethod
    def validate_tables(
        cls, v: Optional[Dict[str, Dict[str, float]]]
    ) -> Optional[Dict[str, Dict[str, float]]]:
        """Every table holds values in [0, 1] that sum to one."""
        if v is None:
            return v
        for name, table in v.items():
            if not table:
                continue
            for key, value in table.items():
                if not math.isfinite(value) or value < 0.0 or value > 1.0 + PROBABILITY_SUM_TOL:
                    raise ValueError(f"Table {name!r} entry {key!r} = {value} is not a probability")
            total = math.fsum(table.values())
            if abs(total - 1.0) > PROBABILITY_SUM_TOL:
                raise ValueError(f"Table {name!r} sums to {total!r}, not 1")
        return v


class StabilityReport(BaseModel):
    """Sensitivity of the hourglass coarse-grainings to jittered drop times."""

    perturbation_scale: float
    trials: int
    f_disagreement: float = Field(..., description="Mean fraction of grid points where f differs")
    g_disagreement: float = Field(..., description="Mean fraction of grid points where g differs")
    f_switches: int = Field(..., description="Exact f switch count of the base run")
    g_switches: int = Field(..., description="Exact g switch count of the base run")
    f_switch_counts: List[int] = Field(default_factory=list, description="Exact f switches per trial")
    g_switch_counts: List[int] = Field(default_factory=list, description="Exact g switches per trial")


class CatalogEntry(BaseModel):
    """One row of the scenario catalog."""
    model_config = ConfigDict(frozen=True)

    name: str
    anchor: str = Field(..., description="Topic the scenario reproduces")
    description: str
    required: List[str] = Field(default_factory=list)
    optional: Dict[str, Any] = Field(default_factory=dict)


class RunReport(BaseModel):
    """Envelope written for every executed configuration."""

    schema_version: int = Field(1, description="Report schema version")
    success: bool = Field(..., description="Whether the run finished without error")
    exit_status: int = Field(..., description="0 success, 1 error, 2 consistency refusal")
    scenario: str = Field(..., description="Scenario or history-set selector that ran")
    result: Optional[ScenarioResult] = Field(None, description="Scenario output on success")

    # Error handling
    error: Optional[str] = Field(None, description="Error message if the run failed")
    error_code: Optional[str] = Field(None, description="Machine-readable error class")
    consistency: Optional[ConsistencyReport] = Field(None, description="Failing consistency check, if any")
    timestamp: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
    )
