"""
Command-line entry point: ``histories run | validate | list-scenarios``.
"""
import argparse
import asyncio
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import structlog

from .core.config import get_defaults, get_settings
from .core.errors import HistoriesError
from .core.logging import configure_logging
from .models.config import RunConfig
from .models.reports import RunReport
from .services.report_writer import ReportWriter
from .services.runner import RunOutcome, apply_overrides, execute, parse_config, run_batch
from .services.scenarios import list_scenarios
from .utils.serialization import dumps

settings = get_settings()
defaults = get_defaults()
logger = structlog.get_logger(__name__)


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histories",
        description="Consistent-histories computations and observer scenarios",
    )
    parser.add_argument("--log-level", default=defaults.log_level, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-format", default=defaults.log_format, choices=["console", "json"])
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Execute one or more run configurations")
    run.add_argument("configs", nargs="+", type=Path, metavar="CONFIG")
    run.add_argument("--seed", type=int, default=None, help="Override the configured seed")
    run.add_argument("--epsilon", type=float, default=None, help="Override the consistency tolerance")
    run.add_argument("--out", type=Path, default=None, help="Report directory")
    run.add_argument("--jobs", type=_positive_int, default=1, help="Concurrent runs in batch mode")

    validate = subparsers.add_parser("validate", help="Check configurations without running them")
    validate.add_argument("configs", nargs="+", type=Path, metavar="CONFIG")

    subparsers.add_parser("list-scenarios", help="Print the scenario catalog")
    return parser


def _config_failure(path: Path, error: Exception) -> Dict[str, object]:
    return {
        "config": str(path),
        "valid": False,
        "error": str(error),
        "error_code": type(error).__name__,
        "violations": getattr(error, "violations", []),
    }


def _load(paths: Sequence[Path], seed: Optional[int], epsilon: Optional[float]) -> List[Tuple[Path, RunConfig]]:
    return [(path, apply_overrides(parse_config(path), seed, epsilon)) for path in paths]


def _batch_names(paths: Sequence[Path]) -> List[str]:
    names: List[str] = []
    for path in paths:
        name, k = path.stem, 1
        while name in names:
            k += 1
            name = f"{path.stem}-{k}"
        names.append(name)
    return names


def _write_config_failure(error: Exception, out: Optional[Path]) -> None:
    if out is None:
        return
    report = RunReport(
        success=False,
        exit_status=1,
        scenario="unknown",
        error=str(error),
        error_code=type(error).__name__,
    )
    try:
        asyncio.run(ReportWriter(out).write(report))
    except OSError as e:
        logger.error("Failed to write report", directory=str(out), error=str(e))


def cmd_run(args: argparse.Namespace) -> int:
    try:
        loaded = _load(args.configs, args.seed, args.epsilon)
    except (HistoriesError, ValueError) as e:
        logger.error("Invalid configuration", error=str(e))
        print(dumps({"success": False, "exit_status": 1, "error": str(e), "error_code": type(e).__name__}), end="")
        _write_config_failure(e, args.out)
        return 1

    if len(loaded) == 1:
        _, config = loaded[0]
        outcome = execute(config, args.out)
        print(dumps(outcome.report), end="")
        return outcome.exit_status

    out_dir = args.out or settings.output_dir
    entries = list(zip(_batch_names([path for path, _ in loaded]), (config for _, config in loaded)))
    outcomes: List[RunOutcome] = asyncio.run(run_batch(entries, args.jobs, out_dir))
    summary = [
        {
            "config": str(path),
            "directory": str(Path(out_dir) / name),
            "exit_status": outcome.exit_status,
            "scenario": outcome.report.scenario,
            "error": outcome.report.error,
        }
        for (path, _), (name, _), outcome in zip(loaded, entries, outcomes)
    ]
    print(dumps(summary), end="")
    return max(outcome.exit_status for outcome in outcomes)


def cmd_validate(args: argparse.Namespace) -> int:
    results = []
    for path in args.configs:
        try:
            config = parse_config(path)
            results.append({"config": str(path), "valid": True, "scenario": config.scenario})
        except (HistoriesError, ValueError) as e:
            results.append(_config_failure(path, e))
    print(dumps(results), end="")
    return 0 if all(r["valid"] for r in results) else 1


def cmd_list_scenarios(args: argparse.Namespace) -> int:
    print(dumps(list_scenarios()), end="")
    return 0


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "list-scenarios": cmd_list_scenarios,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level, args.log_format)
    except ValueError as e:
        print(f"histories: {e}", file=sys.stderr)
        return 1
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
