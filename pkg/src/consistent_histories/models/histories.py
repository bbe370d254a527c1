"""
Projector families, history sets, decoherence matrices and branch trees.
"""
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from ..core.config import get_defaults
from ..core.errors import FamilyValidationError, HistorySetError, LayoutError
from ..models.tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector
from ..utils.validators import require_operator

defaults = get_defaults()

History = Tuple[int, ...]


def _family_deviations(stack: np.ndarray) -> Tuple[float, float, float, float]:
    """(hermitian, idempotence, orthogonality, exhaustiveness) deviations of stacked projectors."""
    n, dim, _ = stack.shape
    identity = np.eye(dim)

    off_diagonal = stack.copy()
    off_diagonal[:, np.arange(dim), np.arange(dim)] = 0.0
    if not np.any(off_diagonal):
        diagonals = stack[:, np.arange(dim), np.arange(dim)]
        hermitian = float(np.max(np.abs(diagonals.imag))) if diagonals.size else 0.0
        idempotence = float(np.max(np.abs(diagonals * diagonals - diagonals)))
        orthogonality = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                orthogonality = max(orthogonality, float(np.max(np.abs(diagonals[i] * diagonals[j]))))
        exhaustive = float(np.max(np.abs(diagonals.sum(axis=0) - 1.0)))
        return hermitian, idempotence, orthogonality, exhaustive

    hermitian = float(np.max(np.abs(stack - np.conj(np.transpose(stack, (0, 2, 1))))))
    idempotence = float(np.max(np.abs(stack @ stack - stack)))
    orthogonality = 0.0
    for i in range(n - 1):
        products = stack[i] @ stack[i + 1:]
        orthogonality = max(orthogonality, float(np.max(np.abs(products))))
    exhaustive = float(np.max(np.abs(stack.sum(axis=0) - identity)))
    return hermitian, idempotence, orthogonality, exhaustive


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    """Exhaustive set of mutually orthogonal projectors, one per alternative."""

    layout: SpaceLayout
    projectors: Tuple[OperatorMatrix, ...]
    labels: Tuple[str, ...] = ()
    tol: float = field(default=defaults.operator_tol, repr=False)

    def __post_init__(self) -> None:
        projectors = tuple(self.projectors)
        if not projectors:
            raise FamilyValidationError("Projector family is empty")
        for p in projectors:
            if p.layout != self.layout:
                raise LayoutError("Projector layout differs from the family layout")
        labels = tuple(self.labels) or tuple(str(k) for k in range(len(projectors)))
        if len(labels) != len(projectors):
            raise FamilyValidationError(f"{len(labels)} labels for {len(projectors)} projectors")

        stack = np.stack([p.entries for p in projectors])
        hermitian, idempotence, orthogonality, exhaustive = _family_deviations(stack)
        if max(hermitian, idempotence) > self.tol:
            raise FamilyValidationError(
                f"Family member is not a projector: deviation {max(hermitian, idempotence):.3e}"
            )
        if orthogonality > self.tol:
            raise FamilyValidationError(f"Family members are not orthogonal: max|P_i P_j| = {orthogonality:.3e}")
        if exhaustive > self.tol:
            raise FamilyValidationError(f"Family is not exhaustive: ‖ΣP−I‖ = {exhaustive:.6g}")

        projectors = tuple(OperatorMatrix(self.layout, p.entries, OperatorKind.PROJECTOR) for p in projectors)
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.projectors)

    def __iter__(self) -> Iterator[OperatorMatrix]:
        return iter(self.projectors)

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.stack([p.entries for p in self.projectors])

    def ranks(self) -> Tuple[int, ...]:
        return tuple(int(round(p.trace().real)) for p in self.projectors)

    def contains(self, op: OperatorMatrix, tol: Optional[float] = None) -> Optional[int]:
        """Index of the member equal to ``op`` within ``tol``, else ``None``."""
        tol = self.tol if tol is None else tol
        if op.layout != self.layout:
            return None
        for k, p in enumerate(self.projectors):
            if np.max(np.abs(p.entries - op.entries)) <= tol:
                return k
        return None


@dataclass(frozen=True, eq=False)
class HistorySet:
    """Initial state, dynamics, increasing times and one family per time.

    Dynamics is either a Hamiltonian (continuous, hbar = 1) or one unitary per
    interval ``(t_{i-1}, t_i]`` with ``t_0 = 0``; a discrete unitary acts at the
    end of its interval, just before that time's projection.
    """

    psi0: StateVector
    times: Tuple[float, ...]
    families: Tuple[ProjectorFamily, ...]
    hamiltonian: Optional[OperatorMatrix] = None
    unitaries: Optional[Tuple[OperatorMatrix, ...]] = None

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.times)
        families = tuple(self.families)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "families", families)

        if (self.hamiltonian is None) == (self.unitaries is None):
            raise HistorySetError("Exactly one of hamiltonian or unitaries must be given")
        if not times:
            raise HistorySetError("History set needs at least one time")
        if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise HistorySetError(f"Times must be non-negative and strictly increasing: {times}")
        if len(families) != len(times):
            raise HistorySetError(f"{len(families)} families for {len(times)} times")
        if abs(self.psi0.norm() - 1.0) > 1e-10:
            raise HistorySetError(f"Initial state has norm {self.psi0.norm():.12g}")

        layout = self.psi0.layout
        for family in families:
            if family.layout != layout:
                raise LayoutError("Family layout differs from the initial state layout")
        if self.hamiltonian is not None:
            if self.hamiltonian.layout != layout:
                raise LayoutError("Hamiltonian layout differs from the initial state layout")
        else:
            unitaries = tuple(self.unitaries)
            object.__setattr__(self, "unitaries", unitaries)
            if len(unitaries) != len(times):
                raise HistorySetError(f"{len(unitaries)} interval unitaries for {len(times)} times")
            for k, u in enumerate(unitaries):
                if u.layout != layout:
                    raise LayoutError(f"Interval unitary {k} layout differs from the initial state layout")
                require_operator(u, OperatorKind.UNITARY, defaults.operator_tol, what=f"Interval unitary {k}")

    @property
    def layout(self) -> SpaceLayout:
        return self.psi0.layout

    @property
    def history_shape(self) -> Tuple[int, ...]:
        return tuple(len(f) for f in self.families)

    @property
    def history_count(self) -> int:
        return int(np.prod(self.history_shape, dtype=np.int64))

    def histories(self) -> Iterator[History]:
        return itertools.product(*(range(n) for n in self.history_shape))

    def history_label(self, alpha: History) -> str:
        return ",".join(family.labels[a] for family, a in zip(self.families, alpha))

    def validate_history(self, alpha: Sequence[int]) -> History:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != len(self.families) or any(
            not 0 <= a < n for a, n in zip(alpha, self.history_shape)
        ):
            raise HistorySetError(f"History {alpha} is not in the index space {self.history_shape}")
        return alpha

    def truncated(self, j: int) -> "HistorySet":
        """The set restricted to its first ``j`` times."""
        if not 1 <= j <= len(self.times):
            raise HistorySetError(f"Cannot truncate to {j} of {len(self.times)} times")
        return HistorySet(
            psi0=self.psi0,
            times=self.times[:j],
            families=self.families[:j],
            hamiltonian=self.hamiltonian,
            unitaries=None if self.unitaries is None else self.unitaries[:j],
        )


@dataclass(frozen=True, eq=False)
class DecoherenceMatrix:
    """``D[alpha, alpha']`` over histories, rows ordered as ``histories``."""

    entries: np.ndarray
    histories: Tuple[History, ...]
    labels: Tuple[str, ...] = ()
    set_id: Optional[int] = None

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex, copy=True)
        entries.setflags(write=False)
        n = len(self.histories)
        if entries.shape != (n, n):
            raise LayoutError(f"Decoherence matrix shape {entries.shape} does not match {n} histories")
        labels = tuple(self.labels) or tuple(",".join(str(a) for a in h) for h in self.histories)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "histories", tuple(tuple(h) for h in self.histories))
        object.__setattr__(self, "labels", labels)

    @cached_property
    def index_map(self) -> Dict[History, int]:
        return {h: k for k, h in enumerate(self.histories)}

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries)

    def __getitem__(self, pair: Tuple[History, History]) -> complex:
        a, b = pair
        return complex(self.entries[self.index_map[tuple(a)], self.index_map[tuple(b)]])


@dataclass(frozen=True, eq=False)
class BranchTree:
    """Unnormalised branch components per level, keyed by partial history.

    Level ``j`` holds the components just after the projection at ``times[j]``
    (level 0 is the root ``psi0`` at time 0).
    """

    times: Tuple[float, ...]
    levels: Tuple[Dict[History, StateVector], ...]
    edge_weights: Dict[History, float]
    prune_norm: float = defaults.prune_norm

    def visible(self, level: int) -> Dict[History, StateVector]:
        """Components of a level whose squared norm reaches the display threshold."""
        return {
            key: vec for key, vec in self.levels[level].items()
            if vec.squared_norm() >= self.prune_norm
        }
