"""JSON file format for encryption sets and reports.

An encryption-set document looks like::

    {
      "format_version": 1,
      "kind": "encryption_set",
      "n": 1,
      "entries": [
        {"p": "0.25", "op": {"pauli": {"alpha": "0", "beta": "1", "phase": "+1"}}},
        {"p": "0.25", "op": {"matrix": [[0.0, 0.0], [1.0, 0.0], ...]}}
      ]
    }

Probabilities are decimal strings (the shortest repr that round-trips the
float). Matrices are row-major lists of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .encryption import EncryptionSet, InvalidEncryptionSetError, make_set
from .pauli import PauliString

FORMAT_VERSION = 1


class SetFileError(ValueError):
    """Raised for documents that cannot be parsed into an encryption set."""


def format_probability(p: float) -> str:
    return repr(float(p))


def parse_probability(text) -> float:
    if not isinstance(text, str):
        raise SetFileError(f"probability must be a decimal string, got {text!r}")
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise SetFileError(f"invalid decimal probability {text!r}") from None
    if not value.is_finite():
        raise SetFileError(f"invalid decimal probability {text!r}")
    return float(value)


def _op_to_json(op) -> dict:
    if isinstance(op, PauliString):
        return {
            "pauli": {"alpha": str(op.alpha), "beta": str(op.beta), "phase": op.phase_label}
        }
    flat = np.asarray(op).reshape(-1)
    return {"matrix": [[float(z.real), float(z.imag)] for z in flat]}


def _op_from_json(doc, n: int):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise SetFileError(f"operator must have exactly one of 'pauli' or 'matrix': {doc!r}")
    if "pauli" in doc:
        spec = doc["pauli"]
        try:
            return PauliString.from_phase(spec["alpha"], spec["beta"], spec.get("phase", "+1"))
        except (KeyError, TypeError, ValueError) as exc:
            raise SetFileError(f"bad pauli operator {spec!r}: {exc}") from None
    if "matrix" in doc:
        d = 2**n
        try:
            pairs = np.asarray(doc["matrix"], dtype=float)
        except (TypeError, ValueError):
            raise SetFileError("matrix entries must be [re, im] number pairs") from None
        if pairs.shape != (d * d, 2):
            raise SetFileError(f"matrix must list {d * d} [re, im] pairs, got shape {pairs.shape}")
        return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d, d)
    raise SetFileError(f"unknown operator kind {sorted(doc)}")


def set_to_dict(s: EncryptionSet) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "encryption_set",
        "n": s.n,
        "entries": [{"p": format_probability(p), "op": _op_to_json(op)} for p, op in s.entries],
    }


def set_from_dict(doc) -> EncryptionSet:
    if not isinstance(doc, dict):
        raise SetFileError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SetFileError(f"unsupported format_version {doc.get('format_version')!r}")
    n = doc.get("n")
    if not isinstance(n, int):
        raise SetFileError(f"'n' must be an integer, got {n!r}")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise SetFileError("'entries' must be a list")
    parsed = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "p" not in entry or "op" not in entry:
            raise SetFileError(f"entry {i} must have 'p' and 'op'")
        parsed.append((parse_probability(entry["p"]), _op_from_json(entry["op"], n)))
    try:
        return make_set(parsed, n=n)
    except InvalidEncryptionSetError as exc:
        raise SetFileError(str(exc)) from None


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_set(s: EncryptionSet, path) -> None:
    Path(path).write_text(dumps(set_to_dict(s)))


def read_set(path) -> EncryptionSet:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SetFileError(f"{path}: not valid JSON ({exc})") from None
    return set_from_dict(doc)


def report_document(kind: str, body: dict) -> dict:
    """Wrap a report body in the same versioned envelope as set files."""
    return {"format_version": FORMAT_VERSION, "kind": kind, **body}
