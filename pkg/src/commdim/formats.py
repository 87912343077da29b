"""File formats: matrices (CSV / JSON), factorizations, protocols, tolerances.

Matrix JSON is ``{"rows": n, "cols": m, "data": [row-major numbers]}``.
Floats are written with ``repr`` so a read/write round trip is byte-exact.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .matcore import Tolerances

__all__ = [
    "matrix_to_obj",
    "matrix_from_obj",
    "dumps_matrix",
    "loads_matrix",
    "read_matrix",
    "write_matrix",
    "factorization_to_obj",
    "read_factorization",
    "protocol_from_obj",
    "read_protocol",
    "read_tolerances",
]


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def matrix_to_obj(M) -> dict:
    arr = np.asarray(M, dtype=float)
    return {"rows": arr.shape[0], "cols": arr.shape[1], "data": [_num(v) for v in arr.ravel()]}


def matrix_from_obj(obj) -> np.ndarray:
    """Accept either the matrix object or a nested list of rows."""
    if isinstance(obj, list):
        try:
            arr = np.array(obj, dtype=float)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad nested-list matrix: {exc}") from None
        if arr.ndim != 2:
            raise FormatError("nested-list matrix must be 2-D")
        return arr
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= set(obj):
        raise FormatError('matrix JSON needs "rows", "cols" and "data"')
    n, m, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(n, int) and isinstance(m, int) and n >= 1 and m >= 1):
        raise FormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != n * m:
        raise FormatError(f"data must hold {n * m} numbers")
    try:
        return np.array(data, dtype=float).reshape(n, m)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"non-numeric matrix data: {exc}") from None


def _fmt_cell(v: float) -> str:
    return repr(_num(v))


def dumps_matrix(M, fmt: str = "json") -> str:
    arr = np.asarray(M, dtype=float)
    if fmt == "json":
        return json.dumps(matrix_to_obj(arr)) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in arr:
            writer.writerow(_fmt_cell(v) for v in row)
        return buf.getvalue()
    raise FormatError(f"unknown matrix format {fmt!r}")


def loads_matrix(text: str, fmt: str = "json") -> np.ndarray:
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        return matrix_from_obj(obj)
    if fmt == "csv":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise FormatError("empty CSV matrix")
        if len({len(r) for r in rows}) != 1:
            raise FormatError("CSV rows have different lengths")
        try:
            return np.array([[float(c) for c in r] for r in rows])
        except ValueError as exc:
            raise FormatError(f"non-numeric CSV entry: {exc}") from None
    raise FormatError(f"unknown matrix format {fmt!r}")


def format_for(path, fmt: str | None = None) -> str:
    if fmt:
        return fmt
    return "csv" if str(path).lower().endswith(".csv") else "json"


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    return loads_matrix(text, format_for(path, fmt))


def write_matrix(path, M, fmt: str | None = None) -> None:
    Path(path).write_text(dumps_matrix(M, format_for(path, fmt)))


def factorization_to_obj(W, H, residual: float, seed) -> dict:
    return {"W": matrix_to_obj(W), "H": matrix_to_obj(H), "residual": residual, "seed": seed}


def read_factorization(path) -> tuple[np.ndarray, np.ndarray]:
    obj = _read_json(path)
    if "W" not in obj or "H" not in obj:
        raise FormatError('factorization JSON needs "W" and "H"')
    return matrix_from_obj(obj["W"]), matrix_from_obj(obj["H"])


def protocol_from_obj(obj):
    from .shared import SRProtocol

    if not isinstance(obj, dict) or "parts" not in obj or "d" not in obj:
        raise FormatError('protocol JSON needs "d" and "parts"')
    try:
        parts = [(p["weight"], matrix_from_obj(p["L"]), matrix_from_obj(p["R"])) for p in obj["parts"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad protocol part: {exc}") from None
    return SRProtocol.from_parts(parts, d=int(obj["d"]))


def read_protocol(path):
    return protocol_from_obj(_read_json(path))


def read_tolerances(path) -> Tolerances:
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise FormatError("tolerance file must hold a JSON object")
    return Tolerances.from_dict(obj)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc}") from None
