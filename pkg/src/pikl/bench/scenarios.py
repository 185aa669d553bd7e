"""Data generators, targets and baselines for the benchmark scenarios.

Every generator draws from ``np.random.default_rng(seed)`` so a (n, seed)
pair always yields the same dataset. Coordinates are returned in the
original problem frame; recentring onto the model's box happens in the
scenario runners.
"""
import math

import numpy as np
from scipy import integrate

from ..estimator import Dataset

# harmonic oscillator f'' + f' + f = 0 on [-pi, pi]

OSC_SIGMA = 0.5


def osc_f1(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x / 2) * np.cos(math.sqrt(3) * x / 2)


def osc_f2(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x / 2) * np.sin(math.sqrt(3) * x / 2)


def gen_oscillator(n, sigma=OSC_SIGMA, seed=0):
    """X ~ U([-pi, pi]), Y = f1(X) + N(0, sigma^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-np.pi, np.pi, n)
    Y = osc_f1(X)
    if sigma > 0:
        Y = Y + sigma * rng.standard_normal(n)
    return Dataset(X, Y)


def ols_oscillator(data):
    """Least squares on span(f1, f2) through the 2x2 normal equations."""
    x = data.X[:, 0]
    B = np.column_stack([osc_f1(x), osc_f2(x)])
    G = B.T @ B
    if data.n < 2 or np.linalg.matrix_rank(G) < 2:
        raise np.linalg.LinAlgError("rank-deficient design: need two distinct points")
    a1, a2 = np.linalg.solve(G, B.T @ data.Y)
    return float(a1), float(a2)


# heat operator with a target that violates it: D f* = 2 sin(2x)

HEAT_SIGMA = 0.5


def heat_target(t, x):
    return np.exp(-t) * np.cos(x) + 0.5 * np.sin(2 * x)


def heat_residual(t, x):
    """d_t f* - d_xx f* = 2 sin(2x)."""
    return 2.0 * np.sin(2 * np.asarray(x, dtype=np.float64)) + 0.0 * np.asarray(t)


def gen_heat_hybrid(n, seed=0, sigma=HEAT_SIGMA):
    """X ~ U([-pi, pi]^2) as (t, x), Y = f*(X) + N(0, sigma^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-np.pi, np.pi, (n, 2))
    Y = heat_target(X[:, 0], X[:, 1])
    if sigma > 0:
        Y = Y + sigma * rng.standard_normal(n)
    return Dataset(X, Y)


def heat_norms():
    """(||D f*||^2, ||f*||^2) over [-pi, pi]^2 by adaptive quadrature."""
    opts = {"epsabs": 1e-12, "epsrel": 1e-12}
    dn, _ = integrate.dblquad(lambda x, t: heat_residual(t, x) ** 2,
                              -np.pi, np.pi, -np.pi, np.pi, **opts)
    fn, _ = integrate.dblquad(lambda x, t: heat_target(t, x) ** 2,
                              -np.pi, np.pi, -np.pi, np.pi, **opts)
    return dn, fn


# convection d_t f + beta d_x f = 0 on [0, 1] x [0, 2 pi], f(0, x) = sin x

CONVECTION_SHIFT = np.array([0.5, np.pi])


def convection_solution(beta, t, x):
    return np.sin(np.asarray(x) - beta * np.asarray(t))


def gen_convection(n, seed=0):
    """Initial-condition samples X = (0, U), Y = sin(U), U ~ U([0, 2 pi])."""
    if n < 4:
        raise ValueError("n must be >= 4")
    rng = np.random.default_rng(seed)
    U = rng.uniform(0.0, 2 * np.pi, n)
    return Dataset(np.column_stack([np.zeros(n), U]), np.sin(U))


# wave d_tt f = 4 d_xx f on [0, 1]^2

def wave_solution(t, x):
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return (np.sin(np.pi * x) * np.cos(2 * np.pi * t)
            + np.sin(4 * np.pi * x) * np.cos(8 * np.pi * t) / 2)


def wave_split(n):
    """Sizes of the four blocks: n//4 three times, then the remainder."""
    q = n // 4
    return q, q, q, n - 3 * q


def gen_wave(n, seed=0, sigma=0.0):
    """Initial row, both boundary columns and the initial-velocity row.

    The last block pins f(1/n, U) to its second-order Taylor value, which
    encodes d_t f(0, .) = 0. With ``sigma > 0`` every target gets N(0, sigma^2)
    noise.
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    rng = np.random.default_rng(seed)
    q1, q2, q3, q4 = wave_split(n)
    U = rng.uniform(0.0, 1.0, n)
    u1, u2, u3, u4 = np.split(U, np.cumsum([q1, q2, q3]))
    X = np.concatenate([
        np.column_stack([np.zeros(q1), u1]),
        np.column_stack([u2, np.zeros(q2)]),
        np.column_stack([u3, np.ones(q3)]),
        np.column_stack([np.full(q4, 1.0 / n), u4]),
    ])
    c = np.pi ** 2 / n ** 2
    Y = np.concatenate([
        np.sin(np.pi * u1) + np.sin(4 * np.pi * u1) / 2,
        np.zeros(q2),
        np.zeros(q3),
        (1 - 2 * c) * np.sin(np.pi * u4) + (0.5 - 16 * c) * np.sin(4 * np.pi * u4),
    ])
    if sigma > 0:
        Y = Y + sigma * rng.standard_normal(n)
    return Dataset(X, Y)


def uniform_grid(lo, hi, size=101):
    """size^d uniform points on the box [lo, hi], as an (N, d) array."""
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    axes = [np.linspace(a, b, size) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


GENERATORS = {
    "oscillator": gen_oscillator,
    "heat_hybrid": gen_heat_hybrid,
    "convection": gen_convection,
    "wave": gen_wave,
}
