"""
Report file output: JSON envelope plus CSV tables for plotting.
"""
import csv
import io
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import aiofiles
import structlog

from ..models.config import OutputFormat
from ..models.reports import RunReport
from ..utils.serialization import dumps, to_jsonable

logger = structlog.get_logger(__name__)

REPORT_FILENAME = "report.json"


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "table"


def render_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(to_jsonable(row))
    return buffer.getvalue()


def csv_documents(report: RunReport, extra_tables: Dict[str, List[Dict[str, Any]]]) -> Dict[str, str]:
    """File name to CSV text for every table in ``report`` and ``extra_tables``.

    Probability tables have columns ``history, probability``; sampled tables
    ``outcome, frequency``.
    """
    documents: Dict[str, str] = {}
    result = report.result
    if result is not None:
        for name, table in result.probabilities.items():
            rows = [{"history": k, "probability": v} for k, v in table.items()]
            documents[f"probabilities_{_slug(name)}.csv"] = render_csv(rows, ["history", "probability"])
        for name, table in (result.sampled or {}).items():
            rows = [{"outcome": k, "frequency": v} for k, v in table.items()]
            documents[f"sampled_{_slug(name)}.csv"] = render_csv(rows, ["outcome", "frequency"])
    for name, rows in extra_tables.items():
        if rows:
            documents[f"{_slug(name)}.csv"] = render_csv(rows, list(rows[0].keys()))
    return documents


class ReportWriter:
    """Writes one run's files into its output directory."""

    def __init__(self, directory: Path, formats: Sequence[OutputFormat] = (OutputFormat.JSON, OutputFormat.CSV)):
        self.directory = Path(directory)
        self.formats = {OutputFormat(f) for f in formats}
        self.directory.mkdir(parents=True, exist_ok=True)

    async def _write(self, filename: str, content: str) -> Path:
        path = self.directory / filename
        async with aiofiles.open(path, "w", encoding="utf-8") as f:
            await f.write(content)
        return path

    async def write(
        self, report: RunReport, extra_tables: Optional[Dict[str, List[Dict[str, Any]]]] = None
    ) -> List[Path]:
        """Write the JSON report and CSV tables; the JSON report is always written on failure."""
        written = []
        if OutputFormat.JSON in self.formats or not report.success:
            written.append(await self._write(REPORT_FILENAME, dumps(report)))
        if OutputFormat.CSV in self.formats:
            for filename, content in csv_documents(report, extra_tables or {}).items():
                written.append(await self._write(filename, content))

        logger.info(
            "Report written",
            directory=str(self.directory),
            files=len(written),
            exit_status=report.exit_status,
        )
        return written
