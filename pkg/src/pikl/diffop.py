"""Constant-coefficient linear differential operators and their symbols.

With ``f = sum_k z_k conj(phi_k)`` (see :mod:`pikl.fourier`), the derivative
``d/dx_l`` multiplies the coefficient of mode ``k`` by ``-i pi k_l / (2 L_l)``.
So an operator ``sum_a c_a d^a`` acts diagonally with the symbol

    P(k) = sum_a c_a prod_l (-i pi k_l / (2 L_l))^{a_l}

which is what :func:`symbol` returns. The sign is pinned by a finite
difference test on :func:`pikl.fourier.synthesize`.
"""
import re
from dataclasses import dataclass

import numpy as np

from .fourier import _as_lengths
from .precision import as_complex


@dataclass(frozen=True)
class LinearDiffOp:
    """sum over ``terms`` of coeff * d^alpha; alpha is a tuple of length d."""

    terms: tuple
    d: int

    def __init__(self, terms, d=None):
        cleaned = {}
        for alpha, coeff in terms:
            alpha = tuple(int(a) for a in alpha)
            if any(a < 0 for a in alpha):
                raise ValueError("derivative orders must be nonnegative")
            if isinstance(coeff, complex) or np.iscomplexobj(coeff):
                raise TypeError("operator coefficients must be real")
            if alpha in cleaned:
                raise ValueError(f"duplicate multi-index {alpha}")
            cleaned[alpha] = float(coeff)
        if not cleaned:
            raise ValueError("operator needs at least one term")
        dims = {len(a) for a in cleaned}
        if len(dims) != 1:
            raise ValueError("all multi-indices must have the same length")
        dim = dims.pop()
        if d is not None and d != dim:
            raise ValueError("dimension mismatch between d and multi-indices")
        object.__setattr__(self, "terms", tuple(sorted(cleaned.items())))
        object.__setattr__(self, "d", dim)

    @property
    def order(self):
        return max(sum(a) for a, _ in self.terms)

    def __add__(self, other):
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        acc = dict(self.terms)
        for a, c in other.terms:
            acc[a] = acc.get(a, 0.0) + c
        return LinearDiffOp(acc.items())

    def __rmul__(self, scalar):
        return LinearDiffOp(((a, scalar * c) for a, c in self.terms))

    def to_config(self):
        return [{"alpha": list(a), "coeff": c} for a, c in self.terms]


def symbol(op, k, L):
    """P(k) for one multi-index or an array of them with shape (..., d)."""
    k = np.asarray(k, dtype=np.float64)
    if k.shape[-1:] != (op.d,):
        raise ValueError(f"multi-index must have {op.d} components")
    factors = -1j * np.pi * k / (2.0 * np.asarray(_as_lengths(L, op.d)))
    out = np.zeros(k.shape[:-1], dtype=np.complex128)
    for alpha, coeff in op.terms:
        # 0**0 == 1 in numpy, as required for absent directions
        out = out + coeff * np.prod(factors ** np.asarray(alpha), axis=-1)
    return complex(out) if out.ndim == 0 else out


def apply_in_hm(op, z, spec):
    """Coefficients of op(f) for f = <z, Phi(.)> in the truncated space."""
    z = as_complex(z)
    if z.shape != (spec.size,):
        raise ValueError(f"coefficient vector must have length {spec.size}")
    if op.d != spec.d:
        raise ValueError("operator / mode set dimension mismatch")
    return symbol(op, spec.modes, spec.L) * z


def ddx():
    return LinearDiffOp([((1,), 1.0)])


def harmonic_oscillator():
    """f'' + f' + f."""
    return LinearDiffOp([((2,), 1.0), ((1,), 1.0), ((0,), 1.0)])


def heat():
    """d_t f - d_xx f on coordinates (t, x)."""
    return LinearDiffOp([((1, 0), 1.0), ((0, 2), -1.0)])


def convection(beta):
    """d_t f + beta d_x f on coordinates (t, x)."""
    return LinearDiffOp([((1, 0), 1.0), ((0, 1), float(beta))])


def wave(c2):
    """d_tt f - c2 d_xx f on coordinates (t, x)."""
    return LinearDiffOp([((2, 0), 1.0), ((0, 2), -float(c2))])


def laplace(d=2):
    return LinearDiffOp(
        [(tuple(2 if i == j else 0 for i in range(d)), 1.0) for j in range(d)]
    )


def identity(d=1):
    return LinearDiffOp([((0,) * d, 1.0)])


PRESETS = {
    "ddx": ddx,
    "harmonic_oscillator": harmonic_oscillator,
    "heat": heat,
    "convection": convection,
    "wave": wave,
    "laplace": laplace,
    "identity": identity,
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def op_from_config(cfg):
    """Operator from a preset name ("wave(4)") or a list of alpha/coeff terms."""
    if isinstance(cfg, str):
        match = _CALL.match(cfg)
        if not match or match.group(1) not in PRESETS:
            raise ValueError(f"unknown operator preset {cfg!r}")
        args = [float(a) for a in match.group(2).split(",")] if match.group(2) else []
        name = match.group(1)
        if name in ("laplace", "identity"):
            args = [int(a) for a in args]
        return PRESETS[name](*args)
    if isinstance(cfg, list):
        return LinearDiffOp((t["alpha"], t["coeff"]) for t in cfg)
    raise ValueError(f"cannot build an operator from {cfg!r}")
