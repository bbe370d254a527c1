"""
Finite-automaton observers, their register layouts and the grid posterior.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import AutomatonError, LayoutError
from .tensor import Factor, SpaceLayout

BRAIN = "B"


@dataclass(frozen=True, eq=False)
class Automaton:
    """Deterministic machine ``B' = transition[B, A]`` over finite alphabets."""

    state_count: int
    input_count: int
    transition: np.ndarray
    initial_state: int = 0
    name: str = "automaton"

    def __post_init__(self) -> None:
        if self.state_count < 1 or self.input_count < 1:
            raise AutomatonError(
                f"Automaton needs positive alphabets, got {self.state_count} states and {self.input_count} inputs"
            )
        table = np.array(self.transition, dtype=np.int64, copy=True)
        if table.shape != (self.state_count, self.input_count):
            raise AutomatonError(
                f"Transition table has shape {table.shape}, expected ({self.state_count}, {self.input_count})"
            )
        if table.size and (table.min() < 0 or table.max() >= self.state_count):
            raise AutomatonError(f"Transition outputs must lie in [0, {self.state_count})")
        if not 0 <= self.initial_state < self.state_count:
            raise AutomatonError(f"Initial state {self.initial_state} out of range")
        table.setflags(write=False)
        object.__setattr__(self, "transition", table)

    def next_state(self, state: int, symbol: int) -> int:
        return int(self.transition[state, symbol])

    def injective_per_input(self) -> bool:
        """Whether every input column permutes the states."""
        return all(
            len(np.unique(self.transition[:, m])) == self.state_count
            for m in range(self.input_count)
        )

    def fold(self, symbols: Sequence[int], start: Optional[int] = None) -> List[int]:
        """Classical record of a run: the state after each symbol."""
        state = self.initial_state if start is None else start
        visited = []
        for symbol in symbols:
            if not 0 <= symbol < self.input_count:
                raise AutomatonError(f"Input symbol {symbol} out of range")
            state = self.next_state(state, symbol)
            visited.append(state)
        return visited


class PointerMode(str, Enum):
    """How the automaton reads its input."""
    SHARED = "shared"  # one pointer A reused every step
    FRESH = "fresh"  # pointer A{k} per step
    DIRECT = "direct"  # automaton reads a system register itself


@dataclass(frozen=True)
class RobotLayout:
    """Registers of a robot run, ordered pointers, a-archives, brain, b-archives, systems."""

    step_budget: int
    input_count: int
    state_count: int
    systems: Tuple[Factor, ...] = (("Q", 2),)
    archiving: bool = True
    pointer_mode: PointerMode = PointerMode.SHARED

    def __post_init__(self) -> None:
        object.__setattr__(self, "systems", tuple((str(l), int(d)) for l, d in self.systems))
        object.__setattr__(self, "pointer_mode", PointerMode(self.pointer_mode))
        if self.step_budget < 1:
            raise LayoutError(f"Step budget must be positive, got {self.step_budget}")
        if not self.systems:
            raise LayoutError("Robot layout needs at least one system register")
        if self.pointer_mode == PointerMode.DIRECT:
            for step in range(self.step_budget):
                label = self.input_label(step)
                if dict(self.systems)[label] != self.input_count:
                    raise LayoutError(f"System register {label!r} does not match {self.input_count} inputs")

    @property
    def pointer_labels(self) -> Tuple[str, ...]:
        if self.pointer_mode == PointerMode.SHARED:
            return ("A",)
        if self.pointer_mode == PointerMode.FRESH:
            return tuple(f"A{k + 1}" for k in range(self.step_budget))
        return ()

    @property
    def a_labels(self) -> Tuple[str, ...]:
        return tuple(f"a{k + 1}" for k in range(self.step_budget)) if self.archiving else ()

    @property
    def b_labels(self) -> Tuple[str, ...]:
        return tuple(f"b{k + 1}" for k in range(self.step_budget)) if self.archiving else ()

    @property
    def brain_label(self) -> str:
        return BRAIN

    @property
    def system_labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.systems)

    @property
    def layout(self) -> SpaceLayout:
        factors: List[Factor] = [(label, self.input_count) for label in self.pointer_labels]
        factors += [(label, self.input_count) for label in self.a_labels]
        factors.append((BRAIN, self.state_count))
        factors += [(label, self.state_count) for label in self.b_labels]
        factors += list(self.systems)
        return SpaceLayout(tuple(factors))

    def _check_step(self, step: int) -> None:
        if not 0 <= step < self.step_budget:
            raise LayoutError(f"Step {step} outside the budget of {self.step_budget}")

    def pointer_for(self, step: int) -> str:
        """Pointer register written by the measurement at ``step``."""
        self._check_step(step)
        if self.pointer_mode == PointerMode.SHARED:
            return "A"
        if self.pointer_mode == PointerMode.FRESH:
            return f"A{step + 1}"
        raise LayoutError("Direct-sensing layouts have no pointer register")

    def input_label(self, step: int) -> str:
        """Register the automaton reads at ``step``."""
        self._check_step(step)
        if self.pointer_mode == PointerMode.DIRECT:
            return self.system_labels[step % len(self.systems)]
        return self.pointer_for(step)

    def archive_labels(self, step: int) -> Tuple[str, ...]:
        self._check_step(step)
        if not self.archiving:
            return ()
        return (f"a{step + 1}", f"b{step + 1}")


@dataclass(frozen=True, eq=False)
class Posterior:
    """Grid posterior over ``|alpha|^2``."""

    grid: np.ndarray
    weights: np.ndarray
    degenerate: bool = False

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float, copy=True)
        weights = np.array(self.weights, dtype=float, copy=True)
        if grid.ndim != 1 or grid.shape != weights.shape or grid.size < 2:
            raise ValueError("Posterior grid and weights must be matching 1-D arrays of length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("Posterior grid must be strictly increasing")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"Posterior weights must be nonnegative and sum to 1, sum is {weights.sum()!r}")
        grid.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, size: int) -> "Posterior":
        if size < 2:
            raise ValueError(f"Posterior grid needs at least 2 points, got {size}")
        return cls(np.linspace(0.0, 1.0, size), np.full(size, 1.0 / size))
