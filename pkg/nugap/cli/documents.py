"""
Plant and result documents.

Plant documents are schema-versioned JSON with ascending coefficient arrays;
complex coefficients are written as [re, im] pairs. Result documents embed
the inputs' content hashes, the NumericConfig used and the tool version.
"""

# built-in imports
import csv
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

# numerical imports
import numpy as np

from nugap import __version__
from nugap.algebra.polyalg import Polynomial, RationalFn
from nugap.algebra.tfm import RationalMatrix, TransferMatrix
from nugap.config import NumericConfig
from nugap.errors import DocumentError, InputError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
KINDS = ("siso", "matrix")


def _parse_number(value: Any, pointer: str) -> complex:
    if isinstance(value, bool):
        raise DocumentError("booleans are not coefficients", pointer)
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise DocumentError("coefficients must be finite", pointer)
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        re, im = (_parse_number(v, f"{pointer}/{k}").real for k, v in enumerate(value))
        return complex(re, im)
    raise DocumentError("a coefficient is a number or an [re, im] pair", pointer)


def _parse_coeffs(value: Any, pointer: str) -> Polynomial:
    if not isinstance(value, list) or not value:
        raise DocumentError("coefficient arrays must be non-empty lists", pointer)
    return Polynomial(np.array([_parse_number(v, f"{pointer}/{k}") for k, v in enumerate(value)]))


def _parse_entry(value: Any, pointer: str) -> RationalFn:
    if not isinstance(value, dict):
        raise DocumentError("an entry is an object with 'num' and 'den'", pointer)
    unknown = set(value) - {"num", "den"}
    if unknown:
        raise DocumentError(f"unexpected entry field(s) {sorted(unknown)}", pointer)
    if "num" not in value:
        raise DocumentError("missing 'num'", f"{pointer}/num")
    num = _parse_coeffs(value["num"], f"{pointer}/num")
    den = _parse_coeffs(value.get("den", [1.0]), f"{pointer}/den")
    if den.is_zero:
        raise DocumentError("denominator is identically zero", f"{pointer}/den")
    return RationalFn(num, den)


def parse_plant(doc: Any, cfg: NumericConfig) -> TransferMatrix:
    """Plant document -> TransferMatrix, with JSON-pointer locations on failure."""
    if not isinstance(doc, dict):
        raise DocumentError("a plant document is a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {version!r}", "/schema_version")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise DocumentError(f"kind must be one of {KINDS}, got {kind!r}", "/kind")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise DocumentError("label must be a string", "/label")
    if "entries" not in doc:
        raise DocumentError("missing 'entries'", "/entries")

    entries = doc["entries"]
    if kind == "siso":
        rows = [[_parse_entry(entries, "/entries")]]
    else:
        if not isinstance(entries, list) or not entries or not all(isinstance(row, list) and row for row in entries):
            raise DocumentError("matrix entries are a non-empty list of non-empty rows", "/entries")
        if len({len(row) for row in entries}) != 1:
            raise DocumentError("matrix rows have unequal lengths", "/entries")
        rows = [[_parse_entry(e, f"/entries/{i}/{j}") for j, e in enumerate(row)] for i, row in enumerate(entries)]
    return TransferMatrix.from_entries(rows, cfg, label=label)


def _emit_number(z: complex) -> Any:
    return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]


def emit_coeffs(p: Polynomial) -> List[Any]:
    return [_emit_number(c) for c in p.coeffs]


def plant_to_document(P: TransferMatrix) -> Dict[str, Any]:
    def entry(r: RationalFn) -> Dict[str, Any]:
        return {"num": emit_coeffs(r.num), "den": emit_coeffs(r.den)}

    doc: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "kind": "siso" if P.is_siso else "matrix"}
    doc["entries"] = entry(P.entry(0, 0)) if P.is_siso else [[entry(r) for r in row] for row in P.entries]
    if P.label is not None:
        doc["label"] = P.label
    return doc


def rational_matrix_to_dict(M: RationalMatrix) -> Dict[str, Any]:
    """{'den': shared denominator, 'num': rows of entry coefficient arrays}."""
    rows, cols = M.shape
    return {
        "den": emit_coeffs(M.den),
        "num": [[emit_coeffs(M.num.entry(i, j)) for j in range(cols)] for i in range(rows)],
    }


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars, arrays and complex numbers; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, shortest round-trip float repr."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, allow_nan=False)


def plant_digest(P: TransferMatrix) -> str:
    return hashlib.sha256(dumps(plant_to_document(P)).encode()).hexdigest()


def load_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", path=path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def load_plant(path: str, cfg: NumericConfig) -> TransferMatrix:
    logger.debug(f"Loading plant document {path}")
    return parse_plant(load_json(path), cfg)


def result_document(
    operation: str,
    inputs: Sequence[TransferMatrix],
    result: Dict[str, Any],
    cfg: NumericConfig,
    extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "operation": operation,
        "inputs": [{"label": P.label, "sha256": plant_digest(P), "shape": list(P.shape)} for P in inputs],
        "result": result,
        "config": cfg.to_dict(),
        "tool": {"name": "nugap", "version": __version__},
    }
    if extra:
        doc.update(extra)
    return doc


def write_plot(path: str, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    """CSV with one header row; theta is always the first column."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info(f"Plot data written to {path}")
