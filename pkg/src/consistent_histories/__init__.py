"""
Consistent Histories.

Decoherence functionals, consistency checks, branch probabilities and
observer scenarios over finite-dimensional quantum systems.
"""

from .core.config import settings

__version__ = "1.0.0"
__all__ = ["settings"]
