"""JSON encodings for matrices and tuples.

Complex entries are written as [re, im] pairs, rows in order.  Python's
float repr round-trips exactly, so a written tuple re-parses bit for bit.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .linalg import MatrixTuple, to_dense


class FormatError(ValueError):
    pass


def matrix_to_json(M) -> list:
    M = to_dense(M)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(obj) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix is not a nested list of numbers: {exc}") from exc
    if arr.ndim == 2:
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"matrix entries must be [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def tuple_to_json(T: MatrixTuple) -> dict:
    return {
        "d": T.d,
        "n": T.n,
        "hermitian": T.hermitian_flags(),
        "matrices": [matrix_to_json(M) for M in T],
    }


def tuple_from_json(obj) -> MatrixTuple:
    if not isinstance(obj, dict) or "matrices" not in obj:
        raise FormatError("tuple JSON needs a 'matrices' field")
    try:
        T = MatrixTuple(matrix_from_json(m) for m in obj["matrices"])
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if "d" in obj and obj["d"] != T.d:
        raise FormatError(f"tuple JSON says d={obj['d']} but holds {T.d} matrices")
    if "n" in obj and obj["n"] != T.n:
        raise FormatError(f"tuple JSON says n={obj['n']} but matrices are {T.n}x{T.n}")
    return T


def load_json(path):
    try:
        if path is None or str(path) == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=1)
    if path is None or str(path) == "-":
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")
