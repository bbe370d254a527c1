"""
Classical hourglass: a robust majority variable against a fragile parity variable.

``f(t) = 1`` while more than half the grains are on top; ``g(t) = 1`` while
an odd number are. Both are coarse-grainings of the same drop times, but only
``f`` survives small perturbations of those times.
"""
from typing import Any, Dict, List, Tuple

import numpy as np
import structlog

from ..models.hourglass import HourglassRun, exact_switches
from ..models.reports import ScenarioName, ScenarioResult, StabilityReport

logger = structlog.get_logger(__name__)

CLUSTER_COUNT = 5
CLUSTER_SPREAD = 0.02
DROP_WINDOW = 0.9


def _draw_drop_times(grains: int, horizon: float, distribution: str, rng: np.random.Generator) -> np.ndarray:
    upper = DROP_WINDOW * horizon
    lower = np.finfo(float).eps * horizon
    if distribution == "uniform":
        times = rng.uniform(0.0, upper, grains)
    elif distribution == "clustered":
        centres = rng.uniform(0.1 * horizon, 0.8 * horizon, CLUSTER_COUNT)
        members = rng.integers(0, CLUSTER_COUNT, grains)
        times = centres[members] + rng.normal(0.0, CLUSTER_SPREAD * horizon, grains)
    else:
        raise ValueError(f"Unknown drop-time distribution {distribution!r}")
    return np.clip(times, lower, upper)


def _trajectories(drop_times: np.ndarray, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top count, f and g on ``grid``; a grain dropping at ``t`` has left the top at ``t``."""
    grains = drop_times.size
    ordered = np.sort(drop_times)
    top = grains - np.searchsorted(ordered, grid, side="right")
    f = (2 * top > grains).astype(np.int8)
    g = (top % 2).astype(np.int8)
    return top, f, g


def simulate_hourglass(
    grains: int,
    horizon: float = 1.0,
    distribution: str = "uniform",
    seed: int = 0,
    grid_points: int = 1000,
) -> HourglassRun:
    """Draw i.i.d. drop times inside the first 90% of the horizon and sample f and g."""
    if grains < 1:
        raise ValueError(f"Need at least one grain, got {grains}")
    if horizon <= 0:
        raise ValueError(f"Horizon must be positive, got {horizon}")
    if grid_points < 2:
        raise ValueError(f"Grid needs at least 2 points, got {grid_points}")

    rng = np.random.default_rng(seed)
    drop_times = _draw_drop_times(grains, horizon, distribution, rng)
    grid = np.linspace(0.0, horizon, grid_points)
    top, f, g = _trajectories(drop_times, grid)

    run = HourglassRun(grains, horizon, distribution, drop_times, grid, top, f, g)
    if run.undersampled:
        logger.warning(
            "Hourglass grid misses transitions",
            grid_g_switches=run.grid_g_switches,
            g_switches=run.g_switches,
            grid_points=grid_points,
        )
    return run


def stability_metrics(base: HourglassRun, perturbation_scale: float, trials: int = 100, seed: int = 0) -> StabilityReport:
    """Mean grid disagreement of f and g when every drop time is jittered by ``U(-s, s)``.

    Trial ``k`` draws from its own generator seeded ``seed + k``.
    """
    if perturbation_scale < 0:
        raise ValueError(f"Perturbation scale must be non-negative, got {perturbation_scale}")
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")

    floor = np.finfo(float).eps * base.horizon
    f_rates, g_rates, f_counts, g_counts = [], [], [], []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        jitter = rng.uniform(-perturbation_scale, perturbation_scale, base.grains)
        perturbed = np.maximum(base.drop_times + jitter, floor)
        _, f, g = _trajectories(perturbed, base.grid)
        f_rates.append(np.mean(f != base.f))
        g_rates.append(np.mean(g != base.g))
        f_switch, g_switch = exact_switches(perturbed)
        f_counts.append(f_switch)
        g_counts.append(g_switch)

    return StabilityReport(
        perturbation_scale=perturbation_scale,
        trials=trials,
        f_disagreement=float(np.mean(f_rates)),
        g_disagreement=float(np.mean(g_rates)),
        f_switches=base.f_switches,
        g_switches=base.g_switches,
        f_switch_counts=f_counts,
        g_switch_counts=g_counts,
    )


def trajectory_rows(run: HourglassRun) -> List[Dict[str, Any]]:
    """One CSV row per grid point."""
    return [
        {"t": float(t), "top_count": int(top), "f": int(f), "g": int(g)}
        for t, top, f, g in zip(run.grid, run.top_count, run.f, run.g)
    ]


def run_hourglass(
    grains: int,
    seed: int,
    horizon: float = 1.0,
    distribution: str = "uniform",
    perturbation: float = 0.01,
    trials: int = 100,
    grid_points: int = 1000,
) -> ScenarioResult:
    """Simulate, then jitter drop times by ``perturbation * horizon`` and compare f with g."""
    run = simulate_hourglass(grains, horizon, distribution, seed, grid_points)
    return summarize_hourglass(run, perturbation, trials, seed)


def summarize_hourglass(run: HourglassRun, perturbation: float, trials: int, seed: int) -> ScenarioResult:
    grains, horizon = run.grains, run.horizon
    stability = stability_metrics(run, perturbation * horizon, trials, seed)

    ordered = np.sort(run.drop_times)
    f_transition = float(ordered[grains - (grains // 2) - 1])

    logger.info(
        "Hourglass finished",
        grains=grains,
        f_disagreement=stability.f_disagreement,
        g_disagreement=stability.g_disagreement,
    )
    return ScenarioResult(
        scenario=ScenarioName.HOURGLASS.value,
        parameters={
            "grains": grains, "horizon": horizon, "distribution": run.distribution,
            "perturbation": perturbation, "trials": trials, "grid_points": int(run.grid.size),
        },
        derived={
            "f_switches": run.f_switches,
            "g_switches": run.g_switches,
            "grid_f_switches": run.grid_f_switches,
            "grid_g_switches": run.grid_g_switches,
            "undersampled": run.undersampled,
            "f_transition_time": f_transition,
            "stability": stability.model_dump(),
        },
        seed=seed,
    )
