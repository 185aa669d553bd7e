"""64-bit precision guard.

Kernel inversion at 32-bit precision visibly corrupts the spectrum of the
Gram matrices, so every numeric entry point funnels its arrays through
:func:`as_real` / :func:`as_complex`, which refuse anything narrower than
float64 / complex128 instead of silently upcasting.
"""
import numpy as np

REAL = np.float64
COMPLEX = np.complex128

_FORBIDDEN = {np.dtype(np.float16), np.dtype(np.float32), np.dtype(np.complex64)}


class PrecisionError(TypeError):
    """Raised when a 32-bit (or narrower) float configuration is requested."""


def check_dtype(dtype):
    """Raise :class:`PrecisionError` for float16/float32/complex64 dtypes."""
    dt = np.dtype(dtype)
    if dt in _FORBIDDEN:
        raise PrecisionError(
            f"{dt} is not allowed in the numeric core; use float64/complex128"
        )
    return dt


def check_precision_name(name):
    """Validate a precision string from a config file ("float64", ...)."""
    try:
        dt = np.dtype(name)
    except TypeError as exc:
        raise PrecisionError(f"unknown precision {name!r}") from exc
    check_dtype(dt)
    if dt not in (np.dtype(REAL), np.dtype(COMPLEX)):
        raise PrecisionError(f"unsupported precision {name!r}")
    return dt


def as_real(a):
    arr = np.asarray(a)
    if arr.dtype.kind in "fc":
        check_dtype(arr.dtype)
    if arr.dtype.kind == "c":
        raise TypeError("expected real input, got complex")
    return np.asarray(arr, dtype=REAL)


def as_complex(a):
    arr = np.asarray(a)
    if arr.dtype.kind in "fc":
        check_dtype(arr.dtype)
    return np.asarray(arr, dtype=COMPLEX)
