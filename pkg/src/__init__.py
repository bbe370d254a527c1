"""Consistent Histories - decoherence functionals, branching wavefunctions and observer scenarios."""

__version__ = "1.0.0"
__author__ = "Consistent Histories Team"
__description__ = "Consistent-histories simulation library and CLI"
