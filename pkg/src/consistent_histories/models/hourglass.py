"""
Hourglass run values: grain drop times and the f/g trajectories they induce.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np


def exact_switches(drop_times: np.ndarray) -> Tuple[int, int]:
    """``(f, g)`` transition counts from the sorted distinct drop times, independent of any grid."""
    grains = drop_times.size
    _, fallen = np.unique(drop_times, return_counts=True)
    top = grains - np.concatenate(([0], np.cumsum(fallen)))
    f = 2 * top > grains
    g = top % 2
    return int(np.count_nonzero(np.diff(f))), int(np.count_nonzero(np.diff(g)))


@dataclass(frozen=True, eq=False)
class HourglassRun:
    """Drop times and the f/g trajectories sampled on an even grid over ``[0, horizon]``."""

    grains: int
    horizon: float
    distribution: str
    drop_times: np.ndarray
    grid: np.ndarray
    top_count: np.ndarray
    f: np.ndarray
    g: np.ndarray

    @property
    def f_switches(self) -> int:
        return exact_switches(self.drop_times)[0]

    @property
    def g_switches(self) -> int:
        return exact_switches(self.drop_times)[1]

    @property
    def grid_f_switches(self) -> int:
        return int(np.count_nonzero(np.diff(self.f)))

    @property
    def grid_g_switches(self) -> int:
        return int(np.count_nonzero(np.diff(self.g)))

    @property
    def undersampled(self) -> bool:
        """Whether the grid misses transitions that the exact drop times contain."""
        return self.grid_g_switches < self.g_switches or self.grid_f_switches < self.f_switches
