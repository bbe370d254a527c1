"""
Core package for Consistent Histories.
"""

from .config import defaults, get_defaults, get_settings, settings
from .logging import configure_logging

__all__ = ["defaults", "get_defaults", "get_settings", "settings", "configure_logging"]
