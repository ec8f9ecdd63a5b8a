"""CSV vector files and the JSON calibration-parameter document."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .params import STANDARD_GRAVITY, AxisAngles, CalibrationParams

SCHEMA_VERSION = 1
VECTOR_HEADER = ("ax", "ay", "az")


def fmt(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_vectors(path) -> np.ndarray:
    """Rows of an ``ax,ay,az`` CSV file as an (n, 3) array.

    Raises InputError naming the offending line for a bad header or row.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != VECTOR_HEADER:
            raise InputError(f"{path}: line 1: expected header 'ax,ay,az', got {header!r}")
        rows = []
        for record in reader:
            line = reader.line_num
            if not record or all(not f.strip() for f in record):
                continue
            if len(record) != 3:
                raise InputError(f"{path}: line {line}: expected 3 fields, got {len(record)}")
            try:
                values = [float(f) for f in record]
            except ValueError:
                raise InputError(f"{path}: line {line}: non-numeric field in {record!r}") from None
            if not all(np.isfinite(values)):
                raise InputError(f"{path}: line {line}: non-finite value in {record!r}")
            rows.append(values)
    return np.array(rows, dtype=float).reshape(-1, 3)


def write_vectors(path, vectors) -> None:
    vectors = np.asarray(vectors, dtype=float).reshape(-1, 3)
    atomic_write_text(path, render_csv(VECTOR_HEADER, (map(float, row) for row in vectors)))


def params_to_document(params: CalibrationParams, g: float = STANDARD_GRAVITY, fit: dict | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "s": [float(v) for v in params.s],
        "b": [float(v) for v in params.b],
        "angles_rad": {"phi": params.angles.phi, "psi": params.angles.psi, "theta": params.angles.theta},
        "g": float(g),
    }
    if fit:
        doc["fit"] = fit
    return doc


def params_from_document(doc: dict) -> tuple[CalibrationParams, float]:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported params schema_version {version!r} (expected {SCHEMA_VERSION})")
    try:
        angles = doc["angles_rad"]
        params = CalibrationParams(
            tuple(float(v) for v in doc["s"]),
            tuple(float(v) for v in doc["b"]),
            AxisAngles(float(angles["phi"]), float(angles["psi"]), float(angles["theta"])),
        )
        g = float(doc.get("g", STANDARD_GRAVITY))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed params document: {exc}") from exc
    return params, g


def write_params(path, params: CalibrationParams, g: float = STANDARD_GRAVITY, fit: dict | None = None) -> None:
    atomic_write_text(path, json.dumps(params_to_document(params, g, fit), indent=2) + "\n")


def read_params(path) -> tuple[CalibrationParams, float]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: params document must be a JSON object")
    return params_from_document(doc)
