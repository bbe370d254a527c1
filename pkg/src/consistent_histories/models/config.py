"""
Run configuration schema.

Complex numbers are either a real number or a two-element ``[re, im]`` array;
matrices are row-major nested arrays of such numbers.
"""
import math
from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.config import get_defaults
from .reports import ScenarioName

defaults = get_defaults()

SCHEMA_VERSION = 1
HISTORY_SET = "history-set"
NORMALIZATION_TOL = 1e-9

ComplexValue = Union[float, Tuple[float, float]]
Matrix = List[List[ComplexValue]]


def as_complex(value: ComplexValue) -> complex:
    if isinstance(value, (tuple, list)):
        return complex(value[0], value[1])
    return complex(value)


class OutputFormat(str, Enum):
    """Report file formats."""
    JSON = "json"
    CSV = "csv"


class OutputConfig(BaseModel):
    """Where and how reports are written."""
    model_config = ConfigDict(extra="forbid")

    directory: Optional[Path] = Field(None, description="Report directory (defaults to HISTORIES_OUTPUT_DIR)")
    formats: List[OutputFormat] = Field(default_factory=lambda: [OutputFormat.JSON, OutputFormat.CSV])


class FamilyConfig(BaseModel):
    """Either explicit projector matrices or the registers whose basis values are the alternatives."""
    model_config = ConfigDict(extra="forbid")

    projectors: Optional[List[Matrix]] = None
    registers: Optional[List[str]] = None
    labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def exactly_one_source(self) -> "FamilyConfig":
        if (self.projectors is None) == (self.registers is None):
            raise ValueError("A family needs exactly one of 'projectors' or 'registers'")
        return self


class HistorySetConfig(BaseModel):
    """Raw history set: layout, initial state, dynamics, times and families."""
    model_config = ConfigDict(extra="forbid")

    layout: List[Tuple[str, int]] = Field(..., min_length=1)
    psi0: List[ComplexValue] = Field(..., min_length=1)
    times: List[float] = Field(..., min_length=1)
    families: List[FamilyConfig] = Field(..., min_length=1)
    hamiltonian: Optional[Matrix] = None
    unitaries: Optional[List[Matrix]] = None
    request_probabilities: bool = Field(True, description="Refuse with exit 2 when the set is inconsistent")
    coarse_time: Optional[int] = Field(None, ge=0, description="Also report the marginal at this time index")

    @model_validator(mode="after")
    def one_dynamics(self) -> "HistorySetConfig":
        if (self.hamiltonian is None) == (self.unitaries is None):
            raise ValueError("A history set needs exactly one of 'hamiltonian' or 'unitaries'")
        if len(self.families) != len(self.times):
            raise ValueError(f"{len(self.families)} families for {len(self.times)} times")
        if self.coarse_time is not None and self.coarse_time >= len(self.times):
            raise ValueError(f"coarse_time {self.coarse_time} is not a time index")
        return self


class RunConfig(BaseModel):
    """One scenario or raw history-set computation."""
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    scenario: str = Field(..., description="Scenario name or 'history-set'")
    seed: int = 0
    epsilon: float = Field(defaults.epsilon, gt=0)

    # Amplitudes: complex alpha/beta, or probabilities with zero phase
    alpha: Optional[ComplexValue] = None
    beta: Optional[ComplexValue] = None
    alpha_sq: Optional[float] = Field(None, ge=0, le=1)
    beta_sq: Optional[float] = Field(None, ge=0, le=1)

    odds: Optional[float] = Field(None, gt=0)
    samples: int = Field(2000, ge=1)
    copies: Optional[int] = Field(None, ge=1)
    mode: Literal["full-quantum", "classical-shortcut"] = "full-quantum"
    grid_size: int = Field(defaults.posterior_grid, ge=2)
    level: float = Field(defaults.credible_level, gt=0, lt=1)
    triples: Optional[int] = Field(None, ge=1)
    truth: Optional[Literal["quantum", "classical"]] = None

    grains: Optional[int] = Field(None, ge=1)
    horizon: float = Field(1.0, gt=0)
    distribution: Literal["uniform", "clustered"] = "uniform"
    perturbation: float = Field(0.01, ge=0)
    trials: int = Field(100, ge=1)
    grid_points: int = Field(1000, ge=2)

    history_set: Optional[HistorySetConfig] = None
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_scenario(self) -> "RunConfig":
        known = {s.value for s in ScenarioName} | {HISTORY_SET}
        if self.scenario not in known:
            raise ValueError(f"Unknown scenario {self.scenario!r}; expected one of {sorted(known)}")

        required = {
            ScenarioName.GAMBLING.value: ["odds"],
            ScenarioName.STATE_ESTIMATION.value: ["copies"],
            ScenarioName.PREPARATION_DISCRIMINATION.value: ["copies"],
            ScenarioName.THEORY_DISCRIMINATION.value: ["triples", "truth"],
            ScenarioName.HOURGLASS.value: ["grains"],
            HISTORY_SET: ["history_set"],
        }.get(self.scenario, [])
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"Scenario {self.scenario!r} requires {missing}")

        if self.scenario in (
            ScenarioName.GAMBLING.value,
            ScenarioName.STATE_ESTIMATION.value,
            ScenarioName.PREPARATION_DISCRIMINATION.value,
        ):
            self.amplitudes()
        return self

    def amplitudes(self) -> Tuple[complex, complex]:
        """``(alpha, beta)`` rescaled to unit norm once within ``NORMALIZATION_TOL``."""
        given_complex = [name for name in ("alpha", "beta") if getattr(self, name) is not None]
        given_squared = [name for name in ("alpha_sq", "beta_sq") if getattr(self, name) is not None]
        if given_complex and given_squared:
            raise ValueError(
                f"Give either 'alpha'/'beta' or 'alpha_sq'/'beta_sq', not both (got {given_complex + given_squared})"
            )

        if self.alpha is not None:
            alpha = as_complex(self.alpha)
            if self.beta is None:
                beta = complex(math.sqrt(max(0.0, 1.0 - abs(alpha) ** 2)))
            else:
                beta = as_complex(self.beta)
            keys = ("alpha", "beta")
        elif self.alpha_sq is not None:
            alpha = complex(math.sqrt(self.alpha_sq))
            beta_sq = 1.0 - self.alpha_sq if self.beta_sq is None else self.beta_sq
            beta = complex(math.sqrt(max(0.0, beta_sq)))
            keys = ("alpha_sq", "beta_sq")
        else:
            raise ValueError("Scenario requires 'alpha' or 'alpha_sq'")

        total = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"'{keys[0]}' and '{keys[1]}' are not normalized: |alpha|^2 + |beta|^2 = {total:.12g}"
            )
        norm = math.sqrt(total)
        return alpha / norm, beta / norm

