"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports cleanly; otherwise (or
when ``PIKL_PURE_PYTHON=1`` is set) the numpy fallback is used. Both expose
the same functions with identical signatures.
"""
import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("PIKL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"


def get_backend(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None)."""
    if name is None:
        return kernels
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
