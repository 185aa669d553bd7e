"""Finite-difference baselines for d_tt f = 4 d_xx f on [0, 1]^2.

Initial data f(0, x) = sin(pi x) + sin(4 pi x)/2, zero initial velocity and
homogeneous Dirichlet conditions at x = 0 and x = 1. The exact solution is
sin(pi x) cos(2 pi t) + sin(4 pi x) cos(8 pi t)/2.

The grid has l1 time steps and l2 space steps. Only the time rows needed by
the caller are kept, so memory stays O(l2) however long the run is.
"""
import csv
from dataclasses import dataclass

import numpy as np

from . import _accel

C2 = 4.0


def initial_profile(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sin(np.pi * x) + np.sin(4 * np.pi * x) / 2


def exact_solution(t, x):
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return (np.sin(np.pi * x) * np.cos(2 * np.pi * t)
            + np.sin(4 * np.pi * x) * np.cos(8 * np.pi * t) / 2)


@dataclass(frozen=True)
class NoisySpec:
    """Gaussian perturbation of the sampled initial row and boundary columns."""

    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be >= 0")


NOISELESS = NoisySpec()


def split_grid(n, ratio=2.1):
    """(l1, l2) with 2*l1 + l2 <= n and l1 = round(ratio * l2).

    The explicit scheme is stable for ratio >= 2 (2 dt <= dx) and exact on
    this problem at ratio = 2; the default sits just inside the stable range.
    """
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    l2 = int(n // (2 * ratio + 1))
    if l2 < 2:
        raise ValueError(f"n={n} is too small for a grid")
    l1 = int(round(ratio * l2))
    if 2 * l1 + l2 > n:
        l1 -= 1
    return l1, l2


@dataclass
class WaveGrid:
    """Solver output: the kept time rows of the (l1+1) x (l2+1) grid."""

    l1: int
    l2: int
    rows: np.ndarray
    values: np.ndarray
    method: str = ""

    def row(self, a):
        hit = np.nonzero(self.rows == a)[0]
        if not len(hit):
            raise KeyError(f"time row {a} was not kept")
        return self.values[hit[0]]

    def evaluate(self, t, x):
        """Bilinear interpolation at points (t, x); needs the bracketing rows."""
        t = np.asarray(t, dtype=np.float64)
        x = np.asarray(x, dtype=np.float64)
        shape = np.broadcast(t, x).shape
        t, x = np.broadcast_to(t, shape).ravel(), np.broadcast_to(x, shape).ravel()
        pos = t * self.l1
        lo = np.clip(np.floor(pos).astype(np.int64), 0, self.l1 - 1)
        w = pos - lo
        xs = np.linspace(0.0, 1.0, self.l2 + 1)
        out = np.empty(len(t))
        for a in np.unique(lo):
            sel = lo == a
            v0 = np.interp(x[sel], xs, self.row(a))
            ws = w[sel]
            if np.any(ws > 0):
                v1 = np.interp(x[sel], xs, self.row(a + 1))
                v0 = (1 - ws) * v0 + ws * v1
            out[sel] = v0
        return out.reshape(shape)

    def to_csv(self, path):
        xs = np.linspace(0.0, 1.0, self.l2 + 1)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "x", "value"])
            for a, vals in zip(self.rows, self.values):
                t = a / self.l1
                for x, v in zip(xs, vals):
                    wr.writerow([repr(float(t)), repr(float(x)), repr(float(v))])


def rows_for(l1, times):
    """Time-row indices bracketing every t in ``times``."""
    pos = np.asarray(times, dtype=np.float64) * l1
    lo = np.clip(np.floor(pos).astype(np.int64), 0, l1 - 1)
    return np.unique(np.concatenate([lo, lo + 1]))


def boundary_data(l1, l2, noisy=NOISELESS, profile=initial_profile):
    """Sampled initial row (l2+1,) and boundary columns (l1+1,), maybe noisy."""
    f0 = profile(np.arange(l2 + 1) / l2)
    left = np.zeros(l1 + 1)
    right = np.zeros(l1 + 1)
    if noisy.noise_sigma > 0:
        rng = np.random.Generator(np.random.Philox(noisy.seed))
        f0 = f0 + noisy.noise_sigma * rng.standard_normal(l2 + 1)
        left = left + noisy.noise_sigma * rng.standard_normal(l1 + 1)
        right = right + noisy.noise_sigma * rng.standard_normal(l1 + 1)
        # the corner nodes belong to the initial row
        left[0], right[0] = f0[0], f0[-1]
    return f0, left, right


def _check(l1, l2):
    if int(l1) != l1 or int(l2) != l2 or l1 < 2 or l2 < 2:
        raise ValueError("l1 and l2 must be integers >= 2")
    return int(l1), int(l2)


def _keep(l1, keep):
    if keep is None:
        return np.arange(l1 + 1)
    keep = np.unique(np.asarray(keep, dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] > l1):
        raise ValueError("kept rows must lie in [0, l1]")
    return keep


def taylor_first_row(f0, left, right, l1, l2):
    """f(dt, .) = f(0, .) + 2 dt^2 (Delta f)(0, .) using the PDE and f_t(0) = 0."""
    f1 = np.empty_like(f0)
    f1[1:-1] = f0[1:-1] + 2.0 * (l2 / l1) ** 2 * (f0[2:] - 2 * f0[1:-1] + f0[:-2])
    f1[0], f1[-1] = left[1], right[1]
    return f1


def solve_euler_explicit(l1, l2, noisy=NOISELESS, keep=None, backend=None,
                         profile=initial_profile):
    """Explicit three-level scheme with the Taylor start-up row."""
    l1, l2 = _check(l1, l2)
    keep = _keep(l1, keep)
    f0, left, right = boundary_data(l1, l2, noisy, profile)
    f1 = taylor_first_row(f0, left, right, l1, l2)
    r2 = C2 * (l2 / l1) ** 2
    kern = _accel.get_backend(backend)
    vals = kern.wave_leapfrog(f0, f1, left, right, r2, keep)
    return WaveGrid(l1, l2, keep, np.asarray(vals), "euler")


def solve_rk4(l1, l2, noisy=NOISELESS, keep=None, backend=None,
              profile=initial_profile):
    """Classical RK4 on (f, g = f_t) with g(0, .) = 0."""
    l1, l2 = _check(l1, l2)
    keep = _keep(l1, keep)
    f0, left, right = boundary_data(l1, l2, noisy, profile)
    g0 = np.zeros_like(f0)
    kern = _accel.get_backend(backend)
    vals = kern.wave_rk4(f0, g0, left, right, l2, C2, keep)
    return WaveGrid(l1, l2, keep, np.asarray(vals), "rk4")


def solve_crank_nicolson(l1, l2, noisy=NOISELESS, keep=None, backend=None,
                         profile=initial_profile):
    """Implicit scheme averaging the Laplacian over rows a and a+1.

    (I - q D2) f(a+1) = 2 f(a) - f(a-1) + q D2 f(a) with q = 2 (l2/l1)^2;
    the tridiagonal matrix is factored once and reused every step.
    """
    l1, l2 = _check(l1, l2)
    keep = _keep(l1, keep)
    f0, left, right = boundary_data(l1, l2, noisy, profile)
    f1 = taylor_first_row(f0, left, right, l1, l2)
    q = 2.0 * (l2 / l1) ** 2
    kern = _accel.get_backend(backend)
    vals = kern.wave_crank_nicolson(f0, f1, left, right, q, keep)
    return WaveGrid(l1, l2, keep, np.asarray(vals), "cn")


SOLVERS = {
    "euler": solve_euler_explicit,
    "rk4": solve_rk4,
    "cn": solve_crank_nicolson,
}


def test_grid(size=101):
    """Uniform size x size grid on [0, 1]^2 as (T, X) meshes."""
    g = np.linspace(0.0, 1.0, size)
    return np.meshgrid(g, g, indexing="ij")


def solver_error(method, l1, l2, noisy=NOISELESS, size=101, backend=None):
    """L2 relative error of one classical scheme on the uniform test grid."""
    from .bench.metrics import l2_relative_error
    T, X = test_grid(size)
    grid = SOLVERS[method](l1, l2, noisy, keep=rows_for(l1, T[:, 0]), backend=backend)
    return l2_relative_error(grid.evaluate(T, X), exact_solution(T, X))
