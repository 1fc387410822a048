"""CSV / JSON helpers.

Matrices are written one row per line with 17 significant digits, which
round-trips IEEE doubles exactly; the same input always yields the same
bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .gram import as_dataset

__all__ = ["read_csv", "write_csv", "write_json", "read_json", "to_jsonable", "config_hash"]


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv(path, name: str | None = None) -> np.ndarray:
    """Load a numeric CSV (optional header row) as an ``n x d`` float array."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open() as fh:
        first = fh.readline()
    tokens = [t.strip() for t in first.strip().split(",")]
    skip = 0 if first.strip() and all(_is_number(t) for t in tokens) else 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2, dtype=float)
    return as_dataset(data, name or path.name)


def write_csv(path, array, header: list[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    array = np.asarray(array, dtype=float)
    if array.ndim == 1:
        array = array[:, None]
    with path.open("w", newline="\n") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in array:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    return path


def to_jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def config_hash(obj) -> str:
    blob = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
