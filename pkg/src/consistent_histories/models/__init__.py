"""Data models for states, operators, robots, configurations and reports."""

from .config import FamilyConfig, HistorySetConfig, OutputConfig, OutputFormat, RunConfig
from .hourglass import HourglassRun
from .reports import (
    CatalogEntry,
    ConsistencyReport,
    PosteriorSummary,
    RunReport,
    ScenarioName,
    ScenarioResult,
    StabilityReport,
    ValidationReport,
)
from .robot import Automaton, PointerMode, Posterior, RobotLayout
from .tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector

__all__ = [
    "FamilyConfig",
    "HistorySetConfig",
    "OutputConfig",
    "OutputFormat",
    "RunConfig",
    "HourglassRun",
    "CatalogEntry",
    "ConsistencyReport",
    "PosteriorSummary",
    "RunReport",
    "ScenarioName",
    "ScenarioResult",
    "StabilityReport",
    "ValidationReport",
    "Automaton",
    "PointerMode",
    "Posterior",
    "RobotLayout",
    "OperatorKind",
    "OperatorMatrix",
    "SpaceLayout",
    "StateVector",
]
