"""Assembly of the regularisation matrix M and the domain projection C.

Both are Hermitian (2m+1)^d square matrices over a :class:`ModeSet`, written
against the convention ``<z, A z> = z^* A z``:

    z^* M z = lam * sum_k (1 + w(k)) |z_k|^2 + mu * int_dom |D f|^2
    z^* C z = int_dom |f|^2

which gives M_jk = lam (1 + w(k)) delta_jk + mu conj(P(j)) P(k) F(j - k) and
C_jk = F(j - k).
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .diffop import LinearDiffOp, symbol
from .domain import Domain
from .fourier import ModeSet
from .precision import as_complex

PER_AXIS = "per_axis"
VOLUME = "volume"


@dataclass(frozen=True)
class GramSpec:
    modes: ModeSet
    s: int
    lam: float
    mu: float
    op: LinearDiffOp
    dom: Domain
    sobolev_scaling: str = PER_AXIS

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1:
            raise ValueError("Sobolev order s must be a positive integer")
        if not 2 * self.s > self.modes.d:
            raise ValueError("Sobolev order must satisfy s > d/2")
        if not self.lam > 0:
            raise ValueError("lambda must be > 0")
        if not self.mu >= 0:
            raise ValueError("mu must be >= 0")
        if self.op.d != self.modes.d or self.dom.d != self.modes.d:
            raise ValueError("operator, domain and modes must share dimension d")
        if self.op.order > self.s:
            raise ValueError(
                f"operator order {self.op.order} exceeds Sobolev order {self.s}"
            )
        if not np.allclose(self.dom.L, self.modes.L, rtol=0, atol=0):
            raise ValueError("domain and mode set must use the same half-widths L")
        if self.sobolev_scaling not in (PER_AXIS, VOLUME):
            raise ValueError(f"unknown Sobolev scaling {self.sobolev_scaling!r}")

    @property
    def size(self):
        return self.modes.size

    def with_params(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class HermitianMatrix:
    entries: np.ndarray
    modes: ModeSet

    def hermitian_defect(self):
        """max |A - A^*| relative to max |A|."""
        a = self.entries
        scale = np.max(np.abs(a))
        return float(np.max(np.abs(a - a.conj().T)) / scale) if scale else 0.0

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def sobolev_weight(modes, s, scaling=PER_AXIS):
    """w(k) in the periodic Sobolev norm sum (1 + w(k)) |z_k|^2."""
    k = modes.modes.astype(np.float64)
    two_l = 2.0 * modes.lengths
    if scaling == PER_AXIS:
        return np.sum((k / two_l) ** 2, axis=1) ** s
    if scaling == VOLUME:
        return (np.sum(k * k, axis=1) / np.prod(two_l)) ** s
    raise ValueError(f"unknown Sobolev scaling {scaling!r}")


def difference_table(dom, modes):
    """F(delta) for every delta in {-2m..2m}^d, shape (4m+1,)*d."""
    m, d = modes.m, modes.d
    grid = np.indices((4 * m + 1,) * d).astype(np.float64) - 2 * m
    return dom.char_fn(np.moveaxis(grid, 0, -1))


def toeplitz_expand(table, modes):
    """Matrix T with T[j, k] = table[j - k], indexed over ``modes``."""
    m, d = modes.m, modes.d
    rev = np.ascontiguousarray(table[(slice(None, None, -1),) * d])
    win = sliding_window_view(rev, (2 * m + 1,) * d)
    win = win[(slice(None, None, -1),) * d]
    return np.array(win.reshape(modes.size, modes.size))


def _hermitize(a):
    out = a + a.conj().T
    out *= 0.5
    return out


def assemble_C(spec):
    table = difference_table(spec.dom, spec.modes)
    return HermitianMatrix(_hermitize(toeplitz_expand(table, spec.modes)), spec.modes)


def penalty_matrix(spec, table=None):
    """Matrix of f -> int_dom |D f|^2 (without the mu factor)."""
    if table is None:
        table = difference_table(spec.dom, spec.modes)
    P = symbol(spec.op, spec.modes.modes, spec.modes.L)
    P = np.atleast_1d(P)
    out = toeplitz_expand(table, spec.modes)
    out *= np.conj(P)[:, None]
    out *= P[None, :]
    return out


def assemble_M(spec, table=None):
    """M = lam (1 + w) on the diagonal + mu * PDE penalty."""
    w = sobolev_weight(spec.modes, spec.s, spec.sobolev_scaling)
    if spec.mu > 0:
        out = penalty_matrix(spec, table)
        out *= spec.mu
    else:
        out = np.zeros((spec.size, spec.size), dtype=np.complex128)
    out[np.diag_indices_from(out)] += spec.lam * (1.0 + w)
    return HermitianMatrix(_hermitize(out), spec.modes)


def penalty_form(spec_or_matrix, z, M: Optional[HermitianMatrix] = None):
    """Re(z^* M z); M is assembled from the spec unless given."""
    if isinstance(spec_or_matrix, HermitianMatrix):
        M = spec_or_matrix
    elif M is None:
        M = assemble_M(spec_or_matrix)
    z = as_complex(z)
    if z.shape != (M.entries.shape[0],):
        raise ValueError("coefficient vector has the wrong length")
    val = np.vdot(z, M.entries @ z)
    scale = abs(val) if val != 0 else 1.0
    if abs(val.imag) > 1e-10 * max(scale, np.vdot(z, z).real):
        raise FloatingPointError(f"quadratic form not real: {val}")
    return float(val.real)
