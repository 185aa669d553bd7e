"""Self-describing dumps of Hermitian matrices and fitted models.

Two formats share one header (JSON on the first line: kind, m, d, L and the
linearised multi-indices):

* ``.csv``: one line per matrix row (or one line for a coefficient vector)
  holding ``re,im`` pairs in row-major order, written with ``repr`` so every
  float64 round-trips exactly;
* anything else: the header line followed by raw little-endian complex128.
"""
import json

import numpy as np

from .fourier import ModeSet

MAGIC = "pikl-dump"
VERSION = 1


def _header(kind, modes, shape, extra=None):
    head = {
        "magic": MAGIC,
        "version": VERSION,
        "kind": kind,
        "m": modes.m,
        "d": modes.d,
        "L": list(modes.L),
        "shape": list(shape),
        "modes": modes.modes.tolist(),
    }
    if extra:
        head.update(extra)
    return head


def _read_header(line):
    try:
        head = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a pikl dump: {exc}") from exc
    if head.get("magic") != MAGIC:
        raise ValueError("not a pikl dump (bad magic)")
    if head.get("version") != VERSION:
        raise ValueError(f"unsupported dump version {head.get('version')}")
    modes = ModeSet(head["m"], head["d"], tuple(head["L"]))
    if modes.modes.tolist() != head["modes"]:
        raise ValueError("mode ordering in the file does not match this library")
    return head, modes


def _is_csv(path):
    return str(path).lower().endswith(".csv")


def _write(path, head, arr):
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    if _is_csv(path):
        with open(path, "w") as fh:
            fh.write(json.dumps(head) + "\n")
            for row in np.atleast_2d(arr):
                flat = []
                for v in row:
                    flat.append(repr(float(v.real)))
                    flat.append(repr(float(v.imag)))
                fh.write(",".join(flat) + "\n")
    else:
        with open(path, "wb") as fh:
            fh.write((json.dumps(head) + "\n").encode())
            fh.write(arr.astype("<c16").tobytes())


def _read(path):
    if _is_csv(path):
        with open(path) as fh:
            head, modes = _read_header(fh.readline())
            rows = []
            for line in fh:
                vals = np.array([float(t) for t in line.strip().split(",")])
                row = np.empty(len(vals) // 2, dtype=np.complex128)
                # assign parts separately: re + 1j * im would lose the sign of -0.0
                row.real, row.imag = vals[0::2], vals[1::2]
                rows.append(row)
        arr = np.array(rows, dtype=np.complex128)
    else:
        with open(path, "rb") as fh:
            head, modes = _read_header(fh.readline().decode())
            arr = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
    return head, modes, arr.reshape(head["shape"])


def save_matrix(matrix, path):
    _write(path, _header("matrix", matrix.modes, matrix.entries.shape), matrix.entries)


def load_matrix(path):
    from .gram import HermitianMatrix
    head, modes, arr = _read(path)
    if head["kind"] != "matrix":
        raise ValueError(f"{path} holds a {head['kind']}, not a matrix")
    return HermitianMatrix(arr, modes)


def save_model(model, path):
    """Coefficients plus the scalar hyperparameters needed to describe them."""
    spec = model.spec
    extra = {"solver": model.solver}
    if spec is not None:
        extra.update({"s": spec.s, "lam": spec.lam, "mu": spec.mu,
                      "op": spec.op.to_config(), "domain": repr(spec.dom),
                      "sobolev_scaling": spec.sobolev_scaling})
    _write(path, _header("model", model.modes, model.z_hat.shape, extra), model.z_hat)


def load_model(path, spec=None):
    """Coefficients and header; pass ``spec`` to get a ready :class:`PiklModel`."""
    from .estimator import PiklModel
    head, modes, arr = _read(path)
    if head["kind"] != "model":
        raise ValueError(f"{path} holds a {head['kind']}, not a model")
    if spec is None:
        return arr, head
    if not spec.modes.same_as(modes):
        raise ValueError("spec mode set does not match the stored coefficients")
    return PiklModel(arr, spec, head.get("solver", "cholesky"))


def inspect(path):
    """Header plus a few summary numbers, for the CLI."""
    head, modes, arr = _read(path)
    info = {k: v for k, v in head.items() if k != "modes"}
    info["size"] = modes.size
    info["max_abs"] = float(np.max(np.abs(arr))) if arr.size else 0.0
    if head["kind"] == "matrix":
        scale = info["max_abs"] or 1.0
        info["hermitian_defect"] = float(np.max(np.abs(arr - arr.conj().T)) / scale)
    return info
