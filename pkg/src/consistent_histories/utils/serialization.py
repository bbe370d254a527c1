"""
JSON encoding for reports: complex numbers as ``[re, im]``, matrices as nested rows.
"""
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, List, Sequence

import numpy as np
from pydantic import BaseModel

from ..core.errors import NumericalError


def encode_complex(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


def decode_vector(values: Sequence[Any]) -> np.ndarray:
    """Complex vector from reals and ``[re, im]`` pairs."""
    return np.array([_decode_scalar(v) for v in values], dtype=complex)


def decode_matrix(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    """Row-major nested arrays to a complex matrix."""
    matrix = np.array([[_decode_scalar(v) for v in row] for row in rows], dtype=complex)
    if matrix.ndim != 2:
        raise ValueError("Matrix rows have unequal lengths")
    return matrix


def _decode_scalar(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex value must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def to_jsonable(obj: Any, path: str = "$") -> Any:
    """Plain JSON types, rejecting NaN and infinities with the offending path."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(), path)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, f"{path}.{k}") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, f"{path}[{i}]") for i, v in enumerate(obj)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist(), path)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        re, im = encode_complex(complex(obj))
        return [to_jsonable(re, f"{path}.re"), to_jsonable(im, f"{path}.im")]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise NumericalError(f"Non-finite value {value!r} at {path}")
        return value
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
