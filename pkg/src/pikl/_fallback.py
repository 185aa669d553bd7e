"""Pure numpy/scipy implementations of the hot kernels.

These mirror ``pikl._kernels`` (Cython) function for function. The compiled
module is preferred at import time; see ``pikl._accel``.
"""
import numpy as np
from scipy.linalg import lapack

_SERIES_MAX = 8.0
_ASYMPTOTIC_MIN = 25.0
_CHUNK = 8192


def _j1_series(x):
    half = 0.5 * x
    q = -half * half
    term = half.copy()
    total = half.copy()
    for k in range(1, 40):
        term = term * q / (k * (k + 1))
        total += term
    return total


def _j1_miller(x):
    # downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
    # 1 = J_0 + 2 sum_{k>=1} J_{2k}
    n_start = int(np.max(x)) + 60
    n_start += n_start % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    for k in range(n_start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{k-1}
        if k - 1 == 1:
            j1 = j_cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            s = np.where(big, 1e-250, 1.0)
            j_cur *= s
            j_next *= s
            norm *= s
            j1 *= s
    norm += j_cur
    return j1 / norm


def _j1_asymptotic(x):
    mu = 4.0
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * term
        else:
            p += (-1) ** (k // 2) * term
    chi = x - 0.75 * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j1(x):
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise ValueError("bessel_j1 expects finite nonnegative arguments")
    out = np.empty_like(flat)
    lo = flat < _SERIES_MAX
    hi = flat >= _ASYMPTOTIC_MIN
    mid = ~(lo | hi)
    if np.any(lo):
        out[lo] = _j1_series(flat[lo])
    if np.any(mid):
        out[mid] = _j1_miller(flat[mid])
    if np.any(hi):
        out[hi] = _j1_asymptotic(flat[hi])
    return out.reshape(x.shape)


def char_sums(X, w, kmax, L):
    """Weighted empirical characteristic sums.

    Returns S with S[k] = sum_i w_i exp(i pi <k, X_i> / (2 L)) for every
    integer multi-index k in {-kmax..kmax}^d, as an array of shape (2kmax+1,)*d.
    """
    X = np.asarray(X, dtype=np.float64)
    w = np.asarray(w, dtype=np.complex128)
    n, d = X.shape
    K = 2 * kmax + 1
    freqs = np.arange(-kmax, kmax + 1, dtype=np.float64)
    out = np.zeros(K ** d, dtype=np.complex128)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        tables = [
            np.exp(1j * (np.pi / (2.0 * L[ax])) * np.outer(X[sl, ax], freqs))
            for ax in range(d)
        ]
        if d == 1:
            out += w[sl] @ tables[0]
            continue
        prod = tables[0] * w[sl, None]
        for t in tables[1:-1]:
            prod = (prod[:, :, None] * t[:, None, :]).reshape(prod.shape[0], -1)
        out += (prod.T @ tables[-1]).ravel()
    return out.reshape((K,) * d)


def _second_diff(row):
    return row[2:] - 2.0 * row[1:-1] + row[:-2]


def wave_leapfrog(f0, f1, left, right, r2, keep):
    """Three-level explicit scheme u+ = 2u - u- + r2 * D2 u."""
    l1 = len(left) - 1
    keep = np.asarray(keep, dtype=np.int64)
    out = np.empty((len(keep), len(f0)))
    slot = {int(a): i for i, a in enumerate(keep)}
    prev = np.array(f0, dtype=np.float64)
    cur = np.array(f1, dtype=np.float64)
    for a, row in ((0, prev), (1, cur)):
        if a in slot:
            out[slot[a]] = row
    for a in range(1, l1):
        nxt = np.empty_like(cur)
        nxt[1:-1] = 2.0 * cur[1:-1] - prev[1:-1] + r2 * _second_diff(cur)
        nxt[0] = left[a + 1]
        nxt[-1] = right[a + 1]
        if a + 1 in slot:
            out[slot[a + 1]] = nxt
        prev, cur = cur, nxt
    return out


def _lap(inner, bl, br, scale):
    padded = np.empty(len(inner) + 2)
    padded[0] = bl
    padded[-1] = br
    padded[1:-1] = inner
    return scale * _second_diff(padded)


def wave_rk4(f0, g0, left, right, l2, c2, keep):
    """Classical RK4 on the system f' = g, g' = c2 * f_xx (interior nodes)."""
    l1 = len(left) - 1
    dt = 1.0 / l1
    scale = c2 * l2 * l2
    keep = np.asarray(keep, dtype=np.int64)
    out = np.empty((len(keep), len(f0)))
    slot = {int(a): i for i, a in enumerate(keep)}
    f = np.array(f0[1:-1], dtype=np.float64)
    g = np.array(g0[1:-1], dtype=np.float64)
    if 0 in slot:
        out[slot[0]] = f0
    for a in range(l1):
        bl0, br0 = left[a], right[a]
        bl1, br1 = left[a + 1], right[a + 1]
        blm, brm = 0.5 * (bl0 + bl1), 0.5 * (br0 + br1)
        k1f = dt * g
        k1g = dt * _lap(f, bl0, br0, scale)
        k2f = dt * (g + 0.5 * k1g)
        k2g = dt * _lap(f + 0.5 * k1f, blm, brm, scale)
        k3f = dt * (g + 0.5 * k2g)
        k3g = dt * _lap(f + 0.5 * k2f, blm, brm, scale)
        k4f = dt * (g + k3g)
        k4g = dt * _lap(f + k3f, bl1, br1, scale)
        f = f + (k1f + 2.0 * k2f + 2.0 * k3f + k4f) / 6.0
        g = g + (k1g + 2.0 * k2g + 2.0 * k3g + k4g) / 6.0
        if a + 1 in slot:
            row = out[slot[a + 1]]
            row[0] = bl1
            row[-1] = br1
            row[1:-1] = f
    return out


def wave_crank_nicolson(f0, f1, left, right, q, keep):
    """Implicit scheme (I - q D2) u+ = 2u - u- + q D2 u, factored once."""
    l1 = len(left) - 1
    n_in = len(f0) - 2
    keep = np.asarray(keep, dtype=np.int64)
    out = np.empty((len(keep), len(f0)))
    slot = {int(a): i for i, a in enumerate(keep)}
    dl = np.full(n_in - 1, -q)
    dd = np.full(n_in, 1.0 + 2.0 * q)
    du = np.full(n_in - 1, -q)
    dl, dd, du, du2, ipiv, info = lapack.dgttrf(dl, dd, du)
    if info != 0:
        raise np.linalg.LinAlgError(f"tridiagonal factorisation failed (info={info})")
    prev = np.array(f0, dtype=np.float64)
    cur = np.array(f1, dtype=np.float64)
    for a, row in ((0, prev), (1, cur)):
        if a in slot:
            out[slot[a]] = row
    for a in range(1, l1):
        rhs = 2.0 * cur[1:-1] - prev[1:-1] + q * _second_diff(cur)
        rhs[0] += q * left[a + 1]
        rhs[-1] += q * right[a + 1]
        sol, info = lapack.dgttrs(dl, dd, du, du2, ipiv, rhs)
        nxt = np.empty_like(cur)
        nxt[1:-1] = sol
        nxt[0] = left[a + 1]
        nxt[-1] = right[a + 1]
        if a + 1 in slot:
            out[slot[a + 1]] = nxt
        prev, cur = cur, nxt
    return out
