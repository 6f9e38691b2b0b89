"""Deterministic JSON report serialization.

Reports must be byte-identical across runs for the same config and inputs,
so floats are rounded to a fixed precision and keys are sorted.
"""

from __future__ import annotations

import json
from pathlib import Path

FLOAT_DIGITS = 12


def round_floats(obj, digits: int = FLOAT_DIGITS):
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


def to_jsonable(obj):
    """Best-effort conversion of report objects to plain JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    if hasattr(obj, "tolist"):  # numpy arrays
        return to_jsonable(obj.tolist())
    return obj


def write_json(path: str | Path, obj) -> None:
    payload = round_floats(to_jsonable(obj))
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
