"""Utility functions and helpers."""

from .serialization import decode_matrix, decode_vector, dumps, to_jsonable
from .validators import require_operator, validate_density_operator, validate_operator

__all__ = [
    "decode_matrix",
    "decode_vector",
    "dumps",
    "to_jsonable",
    "require_operator",
    "validate_density_operator",
    "validate_operator",
]
