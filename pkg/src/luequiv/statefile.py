"""The ``luequiv-state/1`` JSON file format.

One state per file::

    {
      "schema": "luequiv-state/1",
      "kind": "pure",                # or "density"
      "dims": [2, 2],
      "amplitudes": [[re, im], ...]  # "matrix" for densities, row-major
    }

Numbers are written with 17 significant digits so that a write -> read ->
write cycle is byte-stable. An optional ``"meta"`` object is carried along.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import LUEquivError, StateFileError
from .linalg import DensityMatrix, as_pure

SCHEMA = "luequiv-state/1"


def _num(x: float) -> str:
    x = float(x) + 0.0  # no negative zero
    if not math.isfinite(x):
        raise ValueError("non-finite value")
    return format(x, ".17g")


def format_pairs(values: np.ndarray, indent: str = "    ") -> str:
    flat = np.asarray(values, dtype=complex).reshape(-1)
    lines = [f"{indent}[{_num(z.real)}, {_num(z.imag)}]" for z in flat]
    return "[\n" + ",\n".join(lines) + "\n" + indent[:-2] + "]"


def dumps_state(state, meta: dict[str, Any] | None = None) -> str:
    if isinstance(state, DensityMatrix):
        kind, dims, key, data = "density", state.dims, "matrix", state.mat
    else:
        psi = np.asarray(state, dtype=complex)
        kind, dims, key, data = "pure", psi.shape, "amplitudes", psi
    head = [
        f'  "schema": {json.dumps(SCHEMA)}',
        f'  "kind": {json.dumps(kind)}',
        f'  "dims": {json.dumps([int(d) for d in dims])}',
    ]
    if meta:
        head.append(f'  "meta": {json.dumps(meta, sort_keys=True)}')
    head.append(f'  "{key}": {format_pairs(data)}')
    return "{\n" + ",\n".join(head) + "\n}\n"


def write_state(path, state, meta: dict[str, Any] | None = None) -> None:
    Path(path).write_text(dumps_state(state, meta))


def _pairs(raw, expected: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != expected:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise StateFileError(f"expected {expected} [re, im] pairs, got {got}")
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"bad numeric data: {exc}") from None
    if arr.shape != (expected, 2) or not np.all(np.isfinite(arr)):
        raise StateFileError("entries must be finite [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def loads_state(text: str):
    """Parse and validate; returns a pure tensor or a :class:`DensityMatrix`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise StateFileError(f"schema must be {SCHEMA!r}")
    dims = doc.get("dims")
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)
    ):
        raise StateFileError("dims must be a non-empty list of positive integers")
    D = int(np.prod(dims))
    kind = doc.get("kind")
    try:
        if kind == "pure":
            return as_pure(_pairs(doc.get("amplitudes"), D), dims)
        if kind == "density":
            return DensityMatrix(tuple(dims), _pairs(doc.get("matrix"), D * D).reshape(D, D))
    except StateFileError:
        raise
    except LUEquivError as exc:
        raise StateFileError(f"state fails validation: {exc}") from None
    raise StateFileError(f"kind must be 'pure' or 'density', got {kind!r}")


def read_state(path):
    return loads_state(Path(path).read_text())


def read_meta(path) -> dict[str, Any]:
    return json.loads(Path(path).read_text()).get("meta", {})
