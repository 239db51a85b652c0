"""State files, reports, and grid emission (JSON for records, CSV for tables).

Floating-point values are written so they round-trip exactly: CSV cells use
17 significant digits, JSON relies on shortest-repr serialization (which is
round-trip exact by construction).
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputFormatError
from .fock import FockState

NORM_WARN_TOL = 1e-6


def state_to_dict(state: FockState, metadata: dict | None = None) -> dict:
    return {
        "dim": state.dim,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amps],
        "metadata": {str(k): str(v) for k, v in (metadata or {}).items()},
    }


def save_state(path: str | Path, state: FockState, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state, metadata), indent=1) + "\n")


def state_from_dict(payload: dict) -> tuple[FockState, dict]:
    if not isinstance(payload, dict):
        raise InputFormatError("state file must contain a JSON object")
    try:
        dim = int(payload["dim"])
        raw = payload["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"state file missing or malformed field: {exc}") from exc
    if not isinstance(raw, list) or len(raw) != dim or dim < 1:
        raise InputFormatError(
            f"amplitudes must be a list of length dim={dim}, got {type(raw).__name__} "
            f"of length {len(raw) if isinstance(raw, list) else 'n/a'}"
        )
    try:
        amps = np.array([complex(float(re), float(im)) for re, im in raw])
    except (TypeError, ValueError) as exc:
        raise InputFormatError("amplitudes must be [re, im] pairs of numbers") from exc
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise InputFormatError("state file holds the zero vector")
    if abs(norm - 1.0) > NORM_WARN_TOL:
        warnings.warn(
            f"state file norm {norm:.9f} deviates from 1 by more than {NORM_WARN_TOL}; renormalized",
            RuntimeWarning,
            stacklevel=2,
        )
    metadata = payload.get("metadata", {})
    if not isinstance(metadata, dict):
        raise InputFormatError("metadata must be an object")
    return FockState(amps), metadata


def load_state(path: str | Path) -> tuple[FockState, dict]:
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputFormatError(f"state file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"state file is not valid JSON: {exc}") from exc
    return state_from_dict(payload)


def csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(csv_cell(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def dump_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
