"""JSON documents for matrices, states, channels and observables.

Complex matrices travel as ``{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}``.
Validation failures raise :class:`InputError` carrying a JSON pointer to the
offending member.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

from .channels import KrausChannel, identity_channel, make_channel
from .isomorphism import channel_to_state, state_to_channel
from .matcore import DomainError, ShapeError
from .states import (
    I2,
    SX,
    SY,
    SZ,
    BipartiteState,
    DensityMatrix,
    Observable,
    basis_state,
    make_density,
    make_observable,
    max_entangled,
    maximally_mixed,
    singlet,
    werner,
)

SCHEMA = "chronomap/1"
BUILTIN = "builtin:"


class InputError(ValueError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _positive_int(x, ptr) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise InputError("expected a positive integer", ptr)
    return x


def matrix_from_json(doc, ptr: str = "") -> np.ndarray:
    if not isinstance(doc, dict):
        raise InputError("matrix must be an object", ptr)
    for key in ("rows", "cols", "data"):
        if key not in doc:
            raise InputError(f"missing member {key!r}", f"{ptr}/{key}")
    rows = _positive_int(doc["rows"], f"{ptr}/rows")
    cols = _positive_int(doc["cols"], f"{ptr}/cols")
    data = doc["data"]
    if not isinstance(data, list) or len(data) != rows:
        raise InputError(f"data must hold {rows} rows", f"{ptr}/data")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"row must hold {cols} entries", f"{ptr}/data/{i}")
        for j, z in enumerate(row):
            if not (isinstance(z, list) and len(z) == 2 and all(_is_number(v) for v in z)):
                raise InputError("entry must be a finite [re, im] pair", f"{ptr}/data/{i}/{j}")
            out[i, j] = complex(z[0], z[1])
    return out


def _validated(fn, ptr, *args):
    try:
        return fn(*args)
    except (DomainError, ShapeError) as exc:
        raise InputError(str(exc), ptr) from exc


def state_to_json(state: BipartiteState) -> dict:
    return {"schema": SCHEMA, "dims": [state.d_A, state.d_B], "matrix": matrix_to_json(state.mat)}


def state_from_json(doc) -> BipartiteState:
    if not isinstance(doc, dict):
        raise InputError("state document must be an object", "")
    dims = doc.get("dims")
    if not (isinstance(dims, list) and len(dims) == 2):
        raise InputError("dims must be a pair of positive integers", "/dims")
    d_a = _positive_int(dims[0], "/dims/0")
    d_b = _positive_int(dims[1], "/dims/1")
    if "matrix" not in doc:
        raise InputError("missing member 'matrix'", "/matrix")
    m = matrix_from_json(doc["matrix"], "/matrix")
    if m.shape != (d_a * d_b, d_a * d_b):
        raise InputError(f"matrix shape {m.shape} does not match dims {dims}", "/dims")
    rho = _validated(make_density, "/matrix", m)
    return BipartiteState(rho, d_a, d_b)


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "schema": SCHEMA,
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "kraus": [{"p": float(p), "M": matrix_to_json(m)} for p, m in ch.elements],
    }


def channel_from_json(doc) -> KrausChannel:
    if not isinstance(doc, dict):
        raise InputError("channel document must be an object", "")
    d_in = _positive_int(doc.get("d_in"), "/d_in")
    d_out = _positive_int(doc.get("d_out"), "/d_out")
    kraus = doc.get("kraus")
    if not isinstance(kraus, list) or not kraus:
        raise InputError("kraus must be a non-empty list", "/kraus")
    elements = []
    for k, el in enumerate(kraus):
        ptr = f"/kraus/{k}"
        if not isinstance(el, dict):
            raise InputError("Kraus element must be an object", ptr)
        p = el.get("p")
        if not _is_number(p) or p < 0:
            raise InputError("weight must be a non-negative number", f"{ptr}/p")
        m = matrix_from_json(el.get("M"), f"{ptr}/M")
        if m.shape != (d_out, d_in):
            raise InputError(f"Kraus matrix must be {d_out}x{d_in}", f"{ptr}/M")
        elements.append((p, m))
    return _validated(make_channel, "/kraus", elements)


def observable_to_json(o) -> dict:
    m = o.mat if isinstance(o, Observable) else o
    return {"schema": SCHEMA, "matrix": matrix_to_json(m)}


def observable_from_json(doc) -> Observable:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise InputError("missing member 'matrix'", "/matrix")
    return _validated(make_observable, "/matrix", matrix_from_json(doc["matrix"], "/matrix"))


def density_from_json(doc) -> DensityMatrix:
    """A single-system state: ``{"matrix": ...}`` (``dims`` is optional and ignored)."""
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise InputError("missing member 'matrix'", "/matrix")
    return _validated(make_density, "/matrix", matrix_from_json(doc["matrix"], "/matrix"))


# references: a path or a builtin:name[:arg] string

def _split_builtin(ref: str) -> tuple[str, list[str]]:
    name, *args = ref[len(BUILTIN):].split(":")
    return name.lower(), args


def _int_arg(args, ref) -> int:
    try:
        return int(args[0])
    except (IndexError, ValueError):
        raise InputError(f"builtin {ref!r} needs an integer argument", "") from None


def _builtin_state(ref: str) -> BipartiteState | None:
    name, args = _split_builtin(ref)
    if name == "singlet":
        return singlet().to_state()
    if name in ("phi+", "phiplus"):
        return max_entangled(2).to_state()
    if name == "werner":
        try:
            w = float(args[0])
        except (IndexError, ValueError):
            raise InputError(f"builtin {ref!r} needs a numeric argument", "") from None
        return _validated(werner, "", w)
    if name == "maxent":
        return max_entangled(_int_arg(args, ref)).to_state()
    return None


def _builtin_channel(ref: str) -> KrausChannel | None:
    name, args = _split_builtin(ref)
    if name == "identity":
        return identity_channel(_int_arg(args, ref))
    return None


def _load_json(path: str):
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc.msg}", "") from exc


def load_state(ref: str) -> BipartiteState:
    """State file, builtin state, or a channel (mapped to its state)."""
    if ref.startswith(BUILTIN):
        st = _builtin_state(ref)
        if st is not None:
            return st
        ch = _builtin_channel(ref)
        if ch is not None:
            return channel_to_state(ch)
        raise InputError(f"unknown builtin {ref!r}", "")
    doc = _load_json(ref)
    if isinstance(doc, dict) and "kraus" in doc:
        return channel_to_state(channel_from_json(doc))
    return state_from_json(doc)


def load_channel(ref: str) -> KrausChannel:
    """Channel file, builtin channel, or a bipartite state (mapped to its channel)."""
    if ref.startswith(BUILTIN):
        ch = _builtin_channel(ref)
        if ch is not None:
            return ch
        st = _builtin_state(ref)
        if st is not None:
            return state_to_channel(st)
        raise InputError(f"unknown builtin {ref!r}", "")
    doc = _load_json(ref)
    if isinstance(doc, dict) and "dims" in doc:
        return state_to_channel(state_from_json(doc))
    return channel_from_json(doc)


_PAULI = {"sx": SX, "sy": SY, "sz": SZ}


def load_observable(ref: str) -> Observable:
    if ref.startswith(BUILTIN):
        name, args = _split_builtin(ref)
        if name in _PAULI:
            return Observable(_PAULI[name].copy())
        if name == "id":
            return Observable(np.eye(_int_arg(args, ref), dtype=np.complex128) if args else I2.copy())
        if name == "proj":  # proj:d:k
            if len(args) != 2:
                raise InputError(f"builtin {ref!r} needs proj:d:k", "")
            d, k = _int_arg(args[:1], ref), _int_arg(args[1:], ref)
            return Observable(basis_state(d, k).mat)
        raise InputError(f"unknown builtin observable {ref!r}", "")
    return observable_from_json(_load_json(ref))


def load_density(ref: str) -> DensityMatrix:
    if ref.startswith(BUILTIN):
        name, args = _split_builtin(ref)
        if name == "mixed":
            return maximally_mixed(_int_arg(args, ref))
        if name == "ket":  # ket:d:k
            if len(args) != 2:
                raise InputError(f"builtin {ref!r} needs ket:d:k", "")
            return basis_state(_int_arg(args[:1], ref), _int_arg(args[1:], ref))
        raise InputError(f"unknown builtin density {ref!r}", "")
    return density_from_json(_load_json(ref))


def dump(doc: dict) -> str:
    return json.dumps(doc, allow_nan=False)
