"""JSON records for states, channels and superchannels.

Matrices are row-major nested lists. Every emitted record carries
``"version": SCHEMA_VERSION``; readers ignore it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import GaussianChannel
from .errors import DimensionError
from .states import GaussianState
from .superchannels import GaussianSuperchannel

SCHEMA_VERSION = 1

_FIELDS = {
    "state": ("V", "d0"),
    "channel": ("T", "N", "d"),
    "superchannel": ("A", "O", "Y", "dbar"),
}
_TYPES = {"state": GaussianState, "channel": GaussianChannel, "superchannel": GaussianSuperchannel}


class RecordError(ValueError):
    """A JSON record is unreadable, malformed or dimensionally inconsistent."""


def _check_numeric(kind: str, name: str, value, ndim: int):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise RecordError(f"{kind} field '{name}' is not a numeric array") from None
    if arr.ndim != ndim:
        shape = "nested row-major matrix" if ndim == 2 else "flat vector"
        raise RecordError(f"{kind} field '{name}' must be a {shape}, got {arr.ndim}-d data")


def parse_record(kind: str, data) -> GaussianState | GaussianChannel | GaussianSuperchannel:
    if not isinstance(data, dict):
        raise RecordError(f"{kind} record must be a JSON object")
    fields = _FIELDS[kind]
    for i, name in enumerate(fields):
        if name not in data:
            raise RecordError(f"{kind} record is missing field '{name}'")
        _check_numeric(kind, name, data[name], 1 if i == len(fields) - 1 else 2)
    try:
        return _TYPES[kind].from_dict(data)
    except DimensionError as exc:
        raise RecordError(f"{kind} record: {exc}") from None


def load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise RecordError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"malformed JSON in {path}: {exc}") from None


def load_record(kind: str, path: str | Path):
    return parse_record(kind, load_json(path))


def to_record(obj) -> dict:
    return {"version": SCHEMA_VERSION, **obj.to_dict()}


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False)
