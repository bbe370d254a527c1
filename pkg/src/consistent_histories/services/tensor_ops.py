"""
Dense complex linear algebra over labeled tensor-product spaces.
"""
from functools import reduce
from typing import List, Sequence, Union

import numpy as np
import structlog
from scipy import linalg

from ..core.config import get_defaults
from ..core.errors import LayoutError
from ..models.tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector
from ..utils.validators import require_operator, validate_operator

logger = structlog.get_logger(__name__)
defaults = get_defaults()

TensorValue = Union[StateVector, OperatorMatrix]

__all__ = [
    "apply",
    "basis_state",
    "embed_operator",
    "propagator",
    "shift_matrix",
    "tensor_product",
    "validate_operator",
]


def tensor_product(factors: Sequence[TensorValue]) -> TensorValue:
    """Kronecker product in the given factor order on the concatenated layout."""
    if not factors:
        raise LayoutError("tensor_product needs at least one factor")

    if all(isinstance(f, StateVector) for f in factors):
        layout = reduce(lambda acc, f: acc.concat(f.layout), factors[1:], factors[0].layout)
        amplitudes = reduce(np.kron, (f.amplitudes for f in factors))
        normalized = all(f.normalized for f in factors)
        return StateVector(layout, amplitudes, normalized=normalized)

    if all(isinstance(f, OperatorMatrix) for f in factors):
        layout = reduce(lambda acc, f: acc.concat(f.layout), factors[1:], factors[0].layout)
        entries = reduce(np.kron, (f.entries for f in factors))
        kinds = {f.kind_hint for f in factors}
        kind = kinds.pop() if len(kinds) == 1 else OperatorKind.GENERAL
        return OperatorMatrix(layout, entries, kind)

    kinds = sorted({type(f).__name__ for f in factors})
    raise LayoutError(f"tensor_product factors must share one kind, got {kinds}")


def propagator(H: OperatorMatrix, dt: float) -> OperatorMatrix:
    """``exp(-i H dt)`` through the Hermitian eigendecomposition of ``H`` (hbar = 1)."""
    require_operator(H, OperatorKind.HERMITIAN, defaults.operator_tol, what="Hamiltonian")

    hermitian = (H.entries + H.entries.conj().T) / 2
    energies, vectors = linalg.eigh(hermitian)
    phases = np.exp(-1j * energies * dt)
    entries = (vectors * phases) @ vectors.conj().T

    return OperatorMatrix(H.layout, entries, OperatorKind.UNITARY)


def apply(op: OperatorMatrix, psi: StateVector) -> StateVector:
    """Matrix-vector product on a shared layout."""
    if op.layout != psi.layout:
        raise LayoutError(f"Operator layout {op.layout.labels} does not match state layout {psi.layout.labels}")
    return StateVector(psi.layout, op.entries @ psi.amplitudes)


def basis_state(layout: SpaceLayout, digits: Sequence[int]) -> StateVector:
    return StateVector.basis(layout, digits)


def shift_matrix(dim: int, steps: int = 1) -> np.ndarray:
    """Cyclic shift ``|k> -> |k + steps mod dim>``."""
    return np.roll(np.eye(dim, dtype=complex), steps, axis=0)


def embed_operator(
    layout: SpaceLayout,
    labels: Union[str, Sequence[str]],
    local: Union[np.ndarray, OperatorMatrix],
    kind: OperatorKind = OperatorKind.GENERAL,
) -> OperatorMatrix:
    """Lift an operator acting on ``labels`` to the full layout, identity elsewhere."""
    if isinstance(labels, str):
        labels = [labels]
    labels = list(labels)
    if isinstance(local, OperatorMatrix):
        kind = local.kind_hint
        local = local.entries

    dims = list(layout.dims)
    positions: List[int] = [layout.position(label) for label in labels]
    local_dims = [dims[p] for p in positions]
    local_dim = int(np.prod(local_dims))
    local = np.asarray(local, dtype=complex)
    if local.shape != (local_dim, local_dim):
        raise LayoutError(f"Local operator shape {local.shape} does not match factors {labels} (dim {local_dim})")

    total = layout.total_dim
    m = len(positions)
    tensor = local.reshape(local_dims + local_dims)
    identity = np.eye(total, dtype=complex).reshape(dims + dims)
    product = np.tensordot(tensor, identity, axes=(list(range(m, 2 * m)), positions))
    product = np.moveaxis(product, list(range(m)), positions)

    return OperatorMatrix(layout, product.reshape(total, total), kind)
