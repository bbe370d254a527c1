"""Service layer components."""

from .report_writer import ReportWriter

__all__ = ["ReportWriter"]
