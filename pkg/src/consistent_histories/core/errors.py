"""
Exception hierarchy for the consistent-histories toolkit.
"""
from typing import Any, Dict, List, Optional


class HistoriesError(Exception):
    """Base class for every error raised by this package."""


class LayoutError(HistoriesError, ValueError):
    """Tensor-product layouts disagree or are malformed."""


class OperatorValidationError(HistoriesError, ValueError):
    """An operator does not have the kind it claims."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class FamilyValidationError(OperatorValidationError):
    """A projector family is not an orthogonal decomposition of the identity."""


class CapacityError(HistoriesError):
    """A dense computation would exceed the configured caps."""


class InconsistentHistoriesError(HistoriesError):
    """Probabilities were requested for a set that failed the consistency check."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class AutomatonError(HistoriesError, ValueError):
    """Transition table cannot be compiled as requested."""


class ContractViolationError(HistoriesError):
    """A register expected in its null state is populated."""


class NumericalError(HistoriesError):
    """Floating-point results left their admissible range."""


class ConfigError(HistoriesError):
    """Run configuration could not be loaded."""


class ConfigValidationError(ConfigError):
    """Run configuration violates the schema."""

    def __init__(self, message: str, violations: Optional[List[Dict[str, str]]] = None):
        super().__init__(message)
        self.violations = violations or []


class HistorySetError(HistoriesError, ValueError):
    """History set fields are inconsistent with each other."""
