"""JSON and CSV formats.

Complex matrices are nested lists with every entry written as ``[re, im]``.
"""

import csv
import hashlib
import io
import json
import os
import tempfile
from fractions import Fraction

import numpy as np

from ._validation import check_dimension, check_hermitian, check_state
from .bloch import state_to_vector, vector_to_state
from .exceptions import ValidationError
from .nonuniform import DisintegrationDensity
from .observables import DEGENERACY_TOL, observable_from_matrix, observable_from_projectors


def matrix_to_json(A):
    A = np.asarray(A, dtype=complex)
    return np.stack([A.real, A.imag], axis=-1).tolist()


def matrix_from_json(data, name="matrix"):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not a numeric array: {exc}") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValidationError(f"{name} entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def format_number(x):
    """17 significant digits for floats, ``p/q`` for fractions."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return format_number(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(format_number(obj))
    return obj


def dumps(obj):
    """Deterministic JSON text (sorted keys, numbers at full precision)."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def content_hash(obj):
    text = json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def file_hash(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def load_json(path):
    """Read a JSON document; I/O problems raise :class:`OSError`."""
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def write_atomic(path, text):
    """Write through a temporary file so no partial output is left behind."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def state_from_dict(data):
    """Parse a state document; return ``(matrix, bloch_vector)``."""
    if not isinstance(data, dict):
        raise ValidationError("state document must be a JSON object")
    has_m, has_b = "matrix" in data, "bloch" in data
    if has_m == has_b:
        raise ValidationError("state document needs exactly one of 'matrix' or 'bloch'")
    N = check_dimension(data.get("N"))
    if has_m:
        D = matrix_from_json(data["matrix"], "state matrix")
        if D.shape != (N, N):
            raise ValidationError(f"state matrix must be {N}x{N}")
        r = state_to_vector(D)
    else:
        r = np.asarray(data["bloch"], dtype=float)
        if r.shape != (N * N - 1,):
            raise ValidationError(f"Bloch vector must have {N * N - 1} components")
        D = check_state(vector_to_state(r))
    return D, r


def state_to_dict(D=None, r=None):
    if D is not None:
        D = np.asarray(D)
        return {"N": int(D.shape[0]), "matrix": matrix_to_json(D)}
    r = np.asarray(r, dtype=float)
    N = int(round((r.size + 1) ** 0.5))
    return {"N": N, "bloch": r.tolist()}


def observable_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("observable document must be a JSON object")
    if "matrix" in data:
        A = check_hermitian(matrix_from_json(data["matrix"], "observable matrix"), name="observable")
        if "N" in data and A.shape[0] != check_dimension(data["N"]):
            raise ValidationError("observable matrix size does not match N")
        return observable_from_matrix(A, float(data.get("degeneracy_tol", DEGENERACY_TOL)))
    if "projectors" in data:
        P = matrix_from_json(data["projectors"], "projectors")
        return observable_from_projectors(P, data.get("eigenvalues"), data.get("partition"))
    raise ValidationError("observable document needs 'matrix' or 'projectors'")


def observable_to_dict(obs):
    return {
        "N": obs.N,
        "eigenvalues": obs.eigenvalues.tolist(),
        "projectors": matrix_to_json(obs.projectors),
        "partition": [list(g) for g in obs.partition],
    }


def density_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError("density document must be a JSON object")
    return DisintegrationDensity.from_dict(data)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return buf.getvalue()
