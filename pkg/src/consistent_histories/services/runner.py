"""
Configuration loading and execution of scenario and history-set runs.
"""
import asyncio
import json
from concurrent.futures import Executor, ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import structlog
from pydantic import ValidationError

from ..core.config import get_settings
from ..core.errors import ConfigError, ConfigValidationError, FamilyValidationError, InconsistentHistoriesError
from ..models.config import HISTORY_SET, HistorySetConfig, RunConfig
from ..models.histories import HistorySet, ProjectorFamily
from ..models.reports import RunReport, ScenarioName, ScenarioResult
from ..models.tensor import OperatorKind, OperatorMatrix, SpaceLayout, StateVector
from ..utils.serialization import decode_matrix, decode_vector
from .histories import (
    branch_probabilities,
    check_consistency,
    coarse_grain,
    decoherence_functional,
    family_on_registers,
    group_by,
    history_table,
)
from .hourglass import simulate_hourglass, summarize_hourglass, trajectory_rows
from .report_writer import ReportWriter
from .scenarios import (
    run_canonical_observer,
    run_gambling,
    run_preparation_discrimination,
    run_state_estimation,
    run_theory_discrimination,
)

logger = structlog.get_logger(__name__)
settings = get_settings()

ExtraTables = Dict[str, List[Dict[str, Any]]]


class RunOutcome(NamedTuple):
    """Exit status, report and written files of one execution."""
    exit_status: int
    report: RunReport
    files: List[Path]


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def parse_config(path: Union[str, Path]) -> RunConfig:
    """Load and fully validate a run configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigValidationError(
            f"Malformed JSON in {path}: {e.msg}",
            violations=[{"location": f"line {e.lineno}, column {e.colno}", "message": e.msg}],
        )

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        violations = [
            {"location": ".".join(str(p) for p in err["loc"]) or "<root>", "message": err["msg"]}
            for err in e.errors()
        ]
        details = "; ".join(f"{v['location']}: {v['message']}" for v in violations)
        raise ConfigValidationError(f"{path} violates the run configuration schema: {details}", violations)

    if config.history_set is not None:
        build_history_set(config.history_set)

    logger.info("Config parsed", path=str(path), scenario=config.scenario)
    return config


def apply_overrides(config: RunConfig, seed: Optional[int] = None, epsilon: Optional[float] = None) -> RunConfig:
    """Return ``config`` with command-line overrides applied and revalidated."""
    updates: Dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if epsilon is not None:
        updates["epsilon"] = epsilon
    if not updates:
        return config
    try:
        return RunConfig.model_validate({**config.model_dump(), **updates})
    except ValidationError as e:
        violations = [{"location": ".".join(str(p) for p in err["loc"]), "message": err["msg"]} for err in e.errors()]
        raise ConfigValidationError("Command-line override violates the schema", violations)


def build_history_set(config: HistorySetConfig) -> HistorySet:
    """Construct and validate the history set a config declares."""
    layout = SpaceLayout(tuple((label, dim) for label, dim in config.layout))
    psi0 = StateVector(layout, decode_vector(config.psi0))

    families = []
    for k, family in enumerate(config.families):
        try:
            if family.registers is not None:
                families.append(family_on_registers(layout, family.registers, names=family.labels))
            else:
                projectors = tuple(OperatorMatrix(layout, decode_matrix(p)) for p in family.projectors)
                families.append(ProjectorFamily(layout, projectors, tuple(family.labels or ())))
        except FamilyValidationError as e:
            raise FamilyValidationError(f"Family {k}: {e}", report=e.report) from e

    if config.hamiltonian is not None:
        dynamics = {"hamiltonian": OperatorMatrix(layout, decode_matrix(config.hamiltonian), OperatorKind.HERMITIAN)}
    else:
        dynamics = {"unitaries": tuple(OperatorMatrix(layout, decode_matrix(u)) for u in config.unitaries)}

    return HistorySet(psi0=psi0, times=tuple(config.times), families=tuple(families), **dynamics)


# ---------------------------------------------------------------------------
# Computations
# ---------------------------------------------------------------------------

def run_history_set(config: HistorySetConfig, epsilon: float, seed: int) -> ScenarioResult:
    """Decoherence functional, consistency and (on request) probabilities of a raw set."""
    history_set = build_history_set(config)
    D = decoherence_functional(history_set)
    report = check_consistency(D, epsilon)
    derived: Dict[str, Any] = {
        "consistent": report.consistent,
        "max_normalized_offdiag": report.max_normalized_offdiag,
        "history_labels": list(D.labels),
        "decoherence": D.entries,
    }
    tables: Dict[str, Dict[str, float]] = {}

    if config.request_probabilities:
        tables["histories"] = history_table(branch_probabilities(D, report), history_set)
        if config.coarse_time is not None:
            k = config.coarse_time
            grouping, _ = group_by(D, lambda alpha: alpha[k])
            names = [history_set.families[k].labels[block[0][k]] for block in grouping]
            coarse = coarse_grain(D, grouping, names)
            coarse_report = check_consistency(coarse, epsilon)
            marginal = branch_probabilities(coarse, coarse_report)
            tables[f"marginal_t{k}"] = {names[alpha[0]]: p for alpha, p in marginal.items()}

    return ScenarioResult(
        scenario=HISTORY_SET,
        parameters={"histories": history_set.history_count, "dim": history_set.layout.total_dim, "epsilon": epsilon},
        probabilities=tables,
        derived=derived,
        consistency=[report],
        seed=seed,
    )


def _gambling(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    alpha, beta = c.amplitudes()
    return run_gambling(alpha, beta, c.odds, c.seed, c.epsilon, c.samples), {}


def _state_estimation(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    alpha, beta = c.amplitudes()
    result = run_state_estimation(alpha, beta, c.copies, c.seed, c.mode, c.grid_size, c.level, c.epsilon)
    return result, {}


def _preparation(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    alpha, beta = c.amplitudes()
    return run_preparation_discrimination(alpha, beta, c.copies, c.seed), {}


def _theory(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    return run_theory_discrimination(c.triples, c.truth, c.seed, c.epsilon), {}


def _hourglass(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    run = simulate_hourglass(c.grains, c.horizon, c.distribution, c.seed, c.grid_points)
    return summarize_hourglass(run, c.perturbation, c.trials, c.seed), {"trajectory": trajectory_rows(run)}


def _canonical(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    history_set = build_history_set(c.history_set) if c.history_set is not None else None
    return run_canonical_observer(history_set, c.seed, c.epsilon), {}


def _history_set(c: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    return run_history_set(c.history_set, c.epsilon, c.seed), {}


RUNNERS: Dict[str, Callable[[RunConfig], Tuple[ScenarioResult, ExtraTables]]] = {
    ScenarioName.CANONICAL_OBSERVER.value: _canonical,
    ScenarioName.GAMBLING.value: _gambling,
    ScenarioName.HOURGLASS.value: _hourglass,
    ScenarioName.PREPARATION_DISCRIMINATION.value: _preparation,
    ScenarioName.STATE_ESTIMATION.value: _state_estimation,
    ScenarioName.THEORY_DISCRIMINATION.value: _theory,
    HISTORY_SET: _history_set,
}


def run_scenario(config: RunConfig) -> Tuple[ScenarioResult, ExtraTables]:
    """Dispatch ``config`` to its scenario; returns the result and any extra CSV tables."""
    return RUNNERS[config.scenario](config)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _failure(config: RunConfig, exit_status: int, error: Exception, **extra: Any) -> RunReport:
    return RunReport(
        success=False,
        exit_status=exit_status,
        scenario=config.scenario,
        error=str(error),
        error_code=type(error).__name__,
        **extra,
    )


async def execute_async(
    config: RunConfig,
    out_dir: Optional[Path] = None,
    executor: Optional[Executor] = None,
) -> RunOutcome:
    """Run ``config`` off the event loop and write its report files."""
    directory = Path(out_dir or config.output.directory or settings.output_dir)
    loop = asyncio.get_running_loop()
    extra: ExtraTables = {}

    try:
        result, extra = await loop.run_in_executor(executor, run_scenario, config)
        report = RunReport(success=True, exit_status=0, scenario=config.scenario, result=result)
    except InconsistentHistoriesError as e:
        logger.warning("Probabilities refused for an inconsistent set", scenario=config.scenario, error=str(e))
        report = _failure(config, 2, e, consistency=e.report)
    except Exception as e:
        logger.error("Run failed", scenario=config.scenario, error=str(e), error_code=type(e).__name__)
        report = _failure(config, 1, e)

    try:
        writer = ReportWriter(directory, config.output.formats)
        files = await writer.write(report, extra)
    except Exception as e:
        logger.error("Failed to write report", directory=str(directory), error=str(e))
        report = _failure(config, 1, e)
        try:
            files = await ReportWriter(directory).write(report)
        except Exception:
            files = []

    return RunOutcome(report.exit_status, report, files)


def execute(config: RunConfig, out_dir: Optional[Path] = None) -> RunOutcome:
    """Synchronous wrapper around ``execute_async``."""
    return asyncio.run(execute_async(config, out_dir))


async def run_batch(entries: Sequence[Tuple[str, RunConfig]], jobs: int, out_dir: Path) -> List[RunOutcome]:
    """Run named configs concurrently, each into its own subdirectory of ``out_dir``."""
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")
    names = [name for name, _ in entries]
    if len(set(names)) != len(names):
        raise ValueError(f"Batch entry names must be unique: {names}")

    semaphore = asyncio.Semaphore(jobs)
    with ThreadPoolExecutor(max_workers=jobs) as executor:

        async def run_one(name: str, config: RunConfig) -> RunOutcome:
            async with semaphore:
                return await execute_async(config, Path(out_dir) / name, executor)

        outcomes = await asyncio.gather(*(run_one(name, config) for name, config in entries))

    logger.info("Batch finished", runs=len(outcomes), failures=sum(o.exit_status != 0 for o in outcomes))
    return list(outcomes)
