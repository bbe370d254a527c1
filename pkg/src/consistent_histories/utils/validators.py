"""
Operator and amplitude validation utilities.
"""
from typing import Tuple

import numpy as np
import structlog

from ..core.config import get_defaults
from ..core.errors import OperatorValidationError
from ..models.reports import ValidationReport
from ..models.tensor import OperatorKind, OperatorMatrix

logger = structlog.get_logger(__name__)
defaults = get_defaults()


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def hermitian_deviation(entries: np.ndarray) -> float:
    return _max_abs(entries - entries.conj().T)


def unitary_deviation(entries: np.ndarray) -> float:
    return _max_abs(entries.conj().T @ entries - np.eye(entries.shape[0]))


def idempotence_deviation(entries: np.ndarray) -> float:
    return _max_abs(entries @ entries - entries)


def validate_operator(op: OperatorMatrix, kind: OperatorKind, tol: float) -> ValidationReport:
    """Check an operator against a claimed kind and report the worst deviation.

    Hermitian: ``max|A - A^dag|``; unitary: ``max|A^dag A - I|``; projector:
    the larger of the Hermitian and ``max|A^2 - A|`` deviations.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    kind = OperatorKind(kind)
    entries = op.entries

    if kind == OperatorKind.HERMITIAN:
        deviation = hermitian_deviation(entries)
    elif kind == OperatorKind.UNITARY:
        deviation = unitary_deviation(entries)
    elif kind == OperatorKind.PROJECTOR:
        deviation = max(hermitian_deviation(entries), idempotence_deviation(entries))
    else:
        raise ValueError(f"Cannot validate against kind {kind.value!r}")

    return ValidationReport(
        kind=kind.value,
        passed=deviation <= tol,
        max_deviation=deviation,
        tolerance=tol,
    )


def require_operator(op: OperatorMatrix, kind: OperatorKind, tol: float, what: str = "operator") -> None:
    """Raise when ``validate_operator`` fails."""
    report = validate_operator(op, kind, tol)
    if not report.passed:
        raise OperatorValidationError(
            f"{what} is not {report.kind}: deviation {report.max_deviation:.3e} > {tol:.1e}",
            report=report,
        )


def validate_density_operator(rho: OperatorMatrix, tol: float = defaults.density_tol) -> None:
    """Hermitian, unit trace and positive semidefinite, each within ``tol``."""
    entries = rho.entries
    herm = hermitian_deviation(entries)
    if herm > tol:
        raise OperatorValidationError(f"Density operator is not Hermitian: deviation {herm:.3e}")

    trace = complex(np.trace(entries))
    if abs(trace - 1.0) > tol:
        raise OperatorValidationError(f"Density operator has trace {trace:.12g}, expected 1")

    smallest = float(np.min(np.linalg.eigvalsh((entries + entries.conj().T) / 2)))
    if smallest < -tol:
        raise OperatorValidationError(f"Density operator has negative eigenvalue {smallest:.3e}")


def check_amplitude_normalization(alpha: complex, beta: complex, tol: float = 1e-10) -> Tuple[float, float]:
    """Return ``(|alpha|^2, |beta|^2)`` after checking they sum to one."""
    p1 = abs(alpha) ** 2
    p2 = abs(beta) ** 2
    if abs(p1 + p2 - 1.0) > tol:
        raise ValueError(
            f"|alpha|^2 + |beta|^2 = {p1 + p2:.12g} is not 1 within {tol:.0e}"
        )
    return p1, p2
