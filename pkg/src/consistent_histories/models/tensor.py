"""
Labeled tensor-product spaces, states and operators.

Basis ordering: the first listed factor is the most significant mixed-radix
digit, so ``|d_0, d_1, ..., d_k>`` has index ``ravel_multi_index(digits, dims)``.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np

from ..core.errors import LayoutError

Factor = Tuple[str, int]


class OperatorKind(str, Enum):
    """Structural claim attached to an operator."""
    GENERAL = "general"
    HERMITIAN = "hermitian"
    UNITARY = "unitary"
    PROJECTOR = "projector"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor factors ``(label, dimension)``."""

    factors: Tuple[Factor, ...]

    def __post_init__(self) -> None:
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"Duplicate factor labels in layout: {labels}")
        for label, dim in factors:
            if dim < 1:
                raise LayoutError(f"Factor {label!r} has dimension {dim} < 1")

    @classmethod
    def of(cls, *factors: Factor) -> "SpaceLayout":
        return cls(tuple(factors))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.factors else 1

    def dim_of(self, label: str) -> int:
        return self.dims[self.position(label)]

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"Unknown factor label {label!r}; layout has {self.labels}")

    def index_of(self, digits: Sequence[int]) -> int:
        """Mixed-radix digits to basis index."""
        if len(digits) != len(self.factors):
            raise LayoutError(f"Expected {len(self.factors)} digits, got {len(digits)}")
        for digit, (label, dim) in zip(digits, self.factors):
            if not 0 <= digit < dim:
                raise LayoutError(f"Digit {digit} out of range for factor {label!r} (dim {dim})")
        if not self.factors:
            return 0
        return int(np.ravel_multi_index(tuple(int(d) for d in digits), self.dims))

    def digits_of(self, index: int) -> Tuple[int, ...]:
        """Basis index to mixed-radix digits."""
        if not 0 <= index < self.total_dim:
            raise LayoutError(f"Index {index} out of range for dimension {self.total_dim}")
        if not self.factors:
            return ()
        return tuple(int(d) for d in np.unravel_index(index, self.dims))

    def digit_table(self) -> np.ndarray:
        """Digits of every basis index, shape ``(total_dim, n_factors)``."""
        if not self.factors:
            return np.zeros((1, 0), dtype=np.int64)
        return np.stack(np.unravel_index(np.arange(self.total_dim), self.dims), axis=1)

    def concat(self, other: "SpaceLayout") -> "SpaceLayout":
        return SpaceLayout(self.factors + other.factors)

    def sub_layout(self, labels: Iterable[str]) -> "SpaceLayout":
        return SpaceLayout(tuple((label, self.dim_of(label)) for label in labels))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a layout's basis."""

    layout: SpaceLayout
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        amplitudes = _frozen(np.ravel(self.amplitudes))
        if amplitudes.shape[0] != self.layout.total_dim:
            raise LayoutError(
                f"State has {amplitudes.shape[0]} amplitudes; layout needs {self.layout.total_dim}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)
        if self.normalized and abs(self.norm() - 1.0) > 1e-12:
            raise LayoutError(f"State flagged normalized has norm {self.norm():.15g}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise LayoutError("Cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / norm, normalized=True)

    @classmethod
    def basis(cls, layout: SpaceLayout, digits: Sequence[int]) -> "StateVector":
        amplitudes = np.zeros(layout.total_dim, dtype=complex)
        amplitudes[layout.index_of(digits)] = 1.0
        return cls(layout, amplitudes, normalized=True)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense square operator on a layout."""

    layout: SpaceLayout
    entries: np.ndarray
    kind_hint: OperatorKind = field(default=OperatorKind.GENERAL)

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        dim = self.layout.total_dim
        if entries.shape != (dim, dim):
            raise LayoutError(f"Operator shape {entries.shape} does not match layout dimension {dim}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "kind_hint", OperatorKind(self.kind_hint))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @classmethod
    def identity(cls, layout: SpaceLayout) -> "OperatorMatrix":
        return cls(layout, np.eye(layout.total_dim, dtype=complex), OperatorKind.UNITARY)

    @classmethod
    def from_permutation(cls, layout: SpaceLayout, perm: np.ndarray) -> "OperatorMatrix":
        """Unitary mapping basis index ``i`` to ``perm[i]``."""
        dim = layout.total_dim
        perm = np.asarray(perm, dtype=np.int64)
        if perm.shape != (dim,) or not np.array_equal(np.sort(perm), np.arange(dim)):
            raise LayoutError("Permutation array is not a bijection on the basis")
        entries = np.zeros((dim, dim), dtype=complex)
        entries[perm, np.arange(dim)] = 1.0
        return cls(layout, entries, OperatorKind.UNITARY)

    @classmethod
    def projector_onto(cls, state: StateVector) -> "OperatorMatrix":
        vec = state.normalize().amplitudes
        return cls(state.layout, np.outer(vec, vec.conj()), OperatorKind.PROJECTOR)
