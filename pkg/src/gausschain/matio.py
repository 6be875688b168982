"""Deterministic JSON/CSV serialization for matrices and scan tables.

All floats are written with a fixed number of significant digits (17 in
JSON, 12 in CSV) so identical inputs always produce byte-identical files
and JSON matrices round-trip exactly through text.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ParameterError

JSON_SIG_DIGITS = 17
CSV_SIG_DIGITS = 12


def format_json_float(x: float) -> str:
    """Render a float with 17 significant digits (exact decimal round trip)."""
    x = float(x)
    if not np.isfinite(x):
        raise ParameterError(f"cannot serialize non-finite value {x!r}")
    if x == int(x) and abs(x) < 1e16:
        # keep a trailing ".0" so the value parses back as a float
        return f"{x:.1f}"
    return f"{x:.{JSON_SIG_DIGITS}g}"


def format_csv_float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ParameterError(f"cannot serialize non-finite value {x!r}")
    return f"{x:.{CSV_SIG_DIGITS}g}"


def dumps_json(obj: Any, indent: int = 0) -> str:
    """Serialize dicts/lists/scalars with fixed float formatting.

    Dict key order is preserved, so callers control the output layout.
    """
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_json_float(float(obj))
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {dumps_json(v)}" for k, v in obj.items())
        return pad + "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return dumps_json(obj.tolist())
    raise ParameterError(f"cannot serialize object of type {type(obj).__name__}")


def write_json(path: str, obj: Any) -> None:
    text = dumps_json(obj)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def matrix_payload(entries: np.ndarray, labels: Sequence[str]) -> dict:
    """Dense complex matrix as {dim, labels, re, im} with row-major entries."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"matrix payload requires a square matrix, got shape {m.shape}")
    if len(labels) != m.shape[0]:
        raise ParameterError("label count does not match matrix dimension")
    return {
        "dim": int(m.shape[0]),
        "labels": [str(s) for s in labels],
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def matrix_from_payload(payload: dict) -> tuple[np.ndarray, tuple[str, ...]]:
    """Inverse of :func:`matrix_payload`; validates shape and finiteness."""
    if not isinstance(payload, dict):
        raise ParameterError("matrix payload must be a JSON object")
    try:
        dim = int(payload["dim"])
        labels = tuple(str(s) for s in payload["labels"])
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed matrix payload: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ParameterError(
            f"matrix payload shape mismatch: dim={dim}, re{re.shape}, im{im.shape}")
    if len(labels) != dim:
        raise ParameterError("matrix payload labels do not match dim")
    entries = re + 1j * im
    if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
        raise ParameterError("matrix payload contains non-finite entries")
    return entries, labels


def write_matrix(path: str, entries: np.ndarray, labels: Sequence[str],
                 meta: dict | None = None) -> None:
    payload = matrix_payload(entries, labels)
    if meta is not None:
        payload["meta"] = meta
    write_json(path, payload)


def read_matrix(path: str) -> tuple[np.ndarray, tuple[str, ...]]:
    return matrix_from_payload(read_json(path))


def _format_cell(v: Any) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_csv_float(v)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              comments: Sequence[str] = ()) -> None:
    """Write a CSV table with optional '#' comment lines above the header."""
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    """Read back a CSV written by :func:`write_csv` (comments skipped)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParameterError(f"empty CSV file: {path}")
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
