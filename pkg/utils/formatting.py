"""
🧾 Report formatting
====================

Deterministic JSON encoding for reports: sorted keys, numpy arrays as lists
and complex numbers as ``[re, im]`` pairs.
"""

import dataclasses
from enum import Enum
from typing import Any

import numpy as np
import orjson

_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2


def to_plain(obj: Any) -> Any:
    """Recursively convert reports into JSON-friendly builtins"""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_plain(obj.to_dict())
        return to_plain(dataclasses.asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_array(obj)
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def complex_array(arr: np.ndarray) -> Any:
    """Nested lists of ``[re, im]`` pairs"""
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_array(a) for a in arr]


def dumps(obj: Any) -> str:
    return orjson.dumps(to_plain(obj), option=_OPTIONS).decode()


def loads(text: str) -> Any:
    return orjson.loads(text)
