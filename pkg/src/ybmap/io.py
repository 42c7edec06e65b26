"""JSON encodings used by the CLI.

Complex scalars are ``[re, im]``, matrices are row-major lists of rows,
subspaces are ``{"ambient_dim": n, "basis": [columns]}``.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .linalg import ProjectorState, Subspace, as_matrix
from .maps import Polarization


class InputError(ValueError):
    """Malformed input; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def encode_complex(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(obj, path="value"):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        raise InputError("expected a complex number [re, im]", path)
    z = complex(obj[0], obj[1])
    if not np.isfinite(z):
        raise InputError("non-finite complex number", path)
    return z


def encode_vector(v):
    return [encode_complex(x) for x in np.asarray(v).ravel()]


def decode_vector(obj, path="vector"):
    if not isinstance(obj, list) or not obj:
        raise InputError("expected a non-empty list of [re, im]", path)
    return np.array([decode_complex(x, f"{path}[{i}]") for i, x in enumerate(obj)])


def encode_matrix(m):
    return [encode_vector(row) for row in np.asarray(m)]


def decode_matrix(obj, path="matrix"):
    if not isinstance(obj, list) or not obj:
        raise InputError("expected a non-empty list of rows", path)
    rows = [decode_vector(r, f"{path}[{i}]") for i, r in enumerate(obj)]
    if len({r.size for r in rows}) != 1:
        raise InputError("rows have different lengths", path)
    return np.array(rows)


def encode_subspace(s):
    return {"ambient_dim": s.ambient_dim, "basis": [encode_vector(c) for c in s.basis.T]}


def decode_subspace(obj, path="subspace"):
    if not isinstance(obj, dict) or "ambient_dim" not in obj or "basis" not in obj:
        raise InputError('expected {"ambient_dim": n, "basis": [...]}', path)
    n = obj["ambient_dim"]
    if not isinstance(n, int) or n < 1:
        raise InputError("ambient_dim must be a positive integer", f"{path}.ambient_dim")
    cols = obj["basis"]
    if not isinstance(cols, list):
        raise InputError("basis must be a list of columns", f"{path}.basis")
    if not cols:
        return Subspace.zero(n)
    vecs = [decode_vector(c, f"{path}.basis[{i}]") for i, c in enumerate(cols)]
    if any(v.size != n for v in vecs):
        raise InputError(f"basis columns must have length {n}", f"{path}.basis")
    try:
        return Subspace.from_columns(np.column_stack(vecs))
    except Exception as exc:
        raise InputError(str(exc), f"{path}.basis") from exc


def encode_polarization(p):
    return {"lambda": encode_complex(p.lam), "xi": encode_vector(p.xi), "eta": encode_vector(p.eta)}


def encode_state(state, lam):
    """Record for one soliton state with its parameter."""
    if isinstance(state, Polarization):
        return {"lambda": encode_complex(lam), "xi": encode_vector(state.xi),
                "eta": encode_vector(state.eta)}
    if isinstance(state, Subspace):
        return {"lambda": encode_complex(lam), "subspace": encode_subspace(state)}
    return {"lambda": encode_complex(lam), "projector": encode_matrix(state.matrix)}


def state_kind(obj, path="state"):
    if not isinstance(obj, dict):
        raise InputError("expected an object", path)
    if "xi" in obj or "eta" in obj:
        return "vector"
    if "projector" in obj:
        return "projector"
    if "subspace" in obj:
        return "grassmannian"
    raise InputError('state needs "xi"/"eta", "projector" or "subspace"', path)


def decode_state(obj, path="state"):
    """Inverse of :func:`encode_state`; returns ``(state, lam)``.

    Mathematical validation errors (degenerate pairing, non-projector)
    propagate unchanged so callers can map them to exit codes.
    """
    kind = state_kind(obj, path)
    if "lambda" not in obj:
        raise InputError('missing "lambda"', path)
    lam = decode_complex(obj["lambda"], f"{path}.lambda")
    if kind == "vector":
        for key in ("xi", "eta"):
            if key not in obj:
                raise InputError(f'missing "{key}"', path)
        xi = decode_vector(obj["xi"], f"{path}.xi")
        eta = decode_vector(obj["eta"], f"{path}.eta")
        if xi.size != eta.size:
            raise InputError("xi and eta have different lengths", path)
        if lam == 0:
            raise InputError("lambda must be nonzero", f"{path}.lambda")
        return Polarization(xi, eta, lam), lam
    if kind == "grassmannian":
        return decode_subspace(obj["subspace"], f"{path}.subspace"), lam
    m = decode_matrix(obj["projector"], f"{path}.projector")
    try:
        as_matrix(m)
    except ValueError as exc:
        raise InputError(str(exc), f"{path}.projector") from exc
    return ProjectorState.from_matrix(m), lam


def load_json(path):
    """Read a JSON file, turning syntax errors into InputError with line/column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc), str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         str(path)) from exc


def dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
