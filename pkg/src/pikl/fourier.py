"""Fourier modes on the extended torus and the associated feature map.

A function in the truncated space is stored as a coefficient vector ``z``
indexed by integer multi-indices ``k`` with ``max|k_i| <= m``. The global
inner-product convention is ``<a, b> = sum a_i conj(b_i)`` and point
evaluation is ``f(x) = <z, Phi(x)>``, i.e. ``f = sum_k z_k conj(phi_k)``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .precision import as_complex, as_real

#: default ceiling on the number of modes (the Gram matrices are dense N x N)
MODE_BUDGET = 16_000


class CapacityError(ValueError):
    """Raised when (2m+1)^d exceeds the configured mode budget."""


def _as_lengths(L, d):
    arr = np.atleast_1d(np.asarray(L, dtype=np.float64))
    if arr.size == 1:
        arr = np.repeat(arr, d)
    if arr.shape != (d,):
        raise ValueError(f"L must be a scalar or have {d} entries, got {arr.shape}")
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("half-widths L must be positive and finite")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class ModeSet:
    """Modes ``k`` in {-m..m}^d on the torus prod_i [-2 L_i, 2 L_i].

    ``L`` may be a scalar or a per-axis tuple. Modes are ordered
    lexicographically with the first axis varying slowest.
    """

    m: int
    d: int
    L: tuple
    budget: int = MODE_BUDGET

    def __init__(self, m, d, L, budget=MODE_BUDGET):
        if int(m) != m or m < 0:
            raise ValueError("m must be a nonnegative integer")
        if int(d) != d or d < 1:
            raise ValueError("d must be a positive integer")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "L", _as_lengths(L, int(d)))
        object.__setattr__(self, "budget", int(budget))
        if self.size > self.budget:
            raise CapacityError(
                f"(2m+1)^d = {self.size} modes exceeds the budget of {self.budget}"
            )

    @property
    def width(self):
        return 2 * self.m + 1

    @property
    def size(self):
        return self.width ** self.d

    @property
    def lengths(self):
        return np.asarray(self.L)

    @cached_property
    def modes(self):
        """Integer array of shape (size, d) in linearisation order."""
        grids = np.indices((self.width,) * self.d).reshape(self.d, -1).T
        out = grids - self.m
        out.setflags(write=False)
        return out

    @property
    def norm(self):
        """(4L)^{-d/2}, the modulus of every feature entry."""
        return float(np.prod(4.0 * self.lengths) ** -0.5)

    def index_of(self, k):
        k = np.asarray(k, dtype=np.int64)
        if k.shape[-1] != self.d:
            raise ValueError("multi-index dimension mismatch")
        if np.any(np.abs(k) > self.m):
            raise IndexError("mode outside {-m..m}^d")
        idx = np.zeros(k.shape[:-1], dtype=np.int64)
        for ax in range(self.d):
            idx = idx * self.width + (k[..., ax] + self.m)
        return idx

    def k_of(self, i):
        return self.modes[i]

    def frequencies(self):
        """Angular frequencies pi k / (2 L) per mode, shape (size, d)."""
        return self.modes * (np.pi / (2.0 * self.lengths))

    def same_as(self, other):
        return (self.m, self.d, self.L) == (other.m, other.d, other.L)


def enumerate_modes(spec):
    """Modes of ``spec`` as a list of tuples, in linearisation order."""
    return [tuple(int(v) for v in k) for k in spec.modes]


def _points(spec, x):
    X = as_real(x)
    if X.ndim == 1:
        X = X.reshape(1, -1) if spec.d > 1 or X.size == 1 else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != spec.d:
        raise ValueError(f"points must have {spec.d} coordinates")
    return X


def axis_tables(spec, X):
    """Per-axis tables exp(i pi k x_ax / (2 L_ax)) of shape (n, 2m+1)."""
    ks = np.arange(-spec.m, spec.m + 1, dtype=np.float64)
    return [
        np.exp(1j * (np.pi / (2.0 * spec.L[ax])) * np.outer(X[:, ax], ks))
        for ax in range(spec.d)
    ]


def features(spec, X):
    """Feature matrix with rows Phi(X_i), shape (n, (2m+1)^d)."""
    X = _points(spec, X)
    tables = axis_tables(spec, X)
    out = tables[0]
    for t in tables[1:]:
        out = (out[:, :, None] * t[:, None, :]).reshape(len(X), -1)
    return spec.norm * out


def feature_map(spec, x):
    """Phi(x) for a single point: entries (4L)^{-d/2} exp(i pi <k, x> / (2L))."""
    x = as_real(x).reshape(-1)
    if x.shape != (spec.d,):
        raise ValueError(f"point must have {spec.d} coordinates")
    return features(spec, x.reshape(1, -1))[0]


def synthesize(spec, z, xs):
    """Evaluate f(x) = <z, Phi(x)> at every row of ``xs``."""
    z = as_complex(z)
    if z.shape != (spec.size,):
        raise ValueError(f"coefficient vector must have length {spec.size}")
    X = _points(spec, xs)
    tables = [np.conj(t) for t in axis_tables(spec, X)]
    coef = z.reshape((spec.width,) * spec.d)
    # contract the last axis first so the intermediate stays (n, width^(d-1))
    acc = np.einsum("...k,nk->n...", coef, tables[-1]) if spec.d > 1 else None
    if spec.d == 1:
        return spec.norm * (tables[0] @ coef)
    for t in reversed(tables[1:-1]):
        acc = np.einsum("n...k,nk->n...", acc, t)
    return spec.norm * np.einsum("nk,nk->n", acc, tables[0])
