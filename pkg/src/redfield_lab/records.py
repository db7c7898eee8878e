"""Trajectory containers and deterministic file output.

CSV floats are written with 17 significant digits so doubles round-trip
losslessly and reruns diff byte-identically. Every record is validated
before anything is written; a malformed record aborts with
InternalInvariantError instead of emitting a partial file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FLOAT_FORMAT = "%.17g"


class InternalInvariantError(RuntimeError):
    """An output record failed schema validation (NaN, bad time axis, ...)."""


@dataclass
class TrajectoryRecord:
    """Time series plus named scalar columns (insertion order is the
    documented CSV column order)."""

    t: np.ndarray
    columns: dict
    meta: dict = field(default_factory=dict)

    def validate(self) -> None:
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise InternalInvariantError("time axis must be a non-empty 1-d array")
        if not np.all(np.isfinite(t)):
            raise InternalInvariantError("time axis contains non-finite values")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise InternalInvariantError("time axis is not strictly increasing")
        for name, col in self.columns.items():
            if len(col) != t.size:
                raise InternalInvariantError(
                    f"column '{name}' has {len(col)} rows, expected {t.size}")
            if isinstance(col, np.ndarray) and col.dtype.kind == "f":
                if not np.all(np.isfinite(col)):
                    raise InternalInvariantError(
                        f"column '{name}' contains non-finite values")


def format_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v)
    return str(v)


def write_csv(record: TrajectoryRecord, stream) -> None:
    record.validate()
    names = ["t", *record.columns.keys()]
    stream.write(",".join(names) + "\n")
    cols = [np.asarray(record.t, dtype=float), *record.columns.values()]
    for i in range(len(record.t)):
        stream.write(",".join(format_value(c[i]) for c in cols) + "\n")


def _check_json_finite(obj, path="report") -> None:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise InternalInvariantError(f"non-finite value at {path}")
    elif isinstance(obj, dict):
        for k, v in obj.items():
            _check_json_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_json_finite(v, f"{path}[{i}]")


def write_json(obj, stream) -> None:
    _check_json_finite(obj)
    json.dump(obj, stream, indent=2)
    stream.write("\n")


def write_jsonl(rows, stream) -> None:
    for row in rows:
        _check_json_finite(row, "row")
        stream.write(json.dumps(row) + "\n")
