# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in :mod:`pikl._fallback`.

Same functions, same signatures, same results to rounding. The wave
steppers run their time loops in C; ``char_sums`` builds the per-axis
exponential tables in C and hands the accumulation to BLAS zgemm.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt, fabs, M_PI
from scipy.linalg.cython_blas cimport zgemm

cdef double SERIES_MAX = 8.0
cdef double ASYMPTOTIC_MIN = 25.0
cdef int CHUNK = 4096


cdef double _j1_series(double x) nogil:
    cdef double half = 0.5 * x
    cdef double q = -half * half
    cdef double term = half
    cdef double total = half
    cdef int k
    for k in range(1, 40):
        term = term * q / (k * (k + 1))
        total += term
    return total


cdef double _j1_miller(double x) nogil:
    cdef int n_start = <int>x + 60
    cdef int k
    cdef double j_next = 0.0, j_cur = 1e-30, j_prev, norm = 0.0, j1 = 0.0, s
    n_start += n_start % 2
    k = n_start
    while k > 0:
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        if k - 1 == 1:
            j1 = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if fabs(j_cur) > 1e250:
            s = 1e-250
            j_cur *= s
            j_next *= s
            norm *= s
            j1 *= s
        k -= 1
    norm += j_cur
    return j1 / norm


cdef double _j1_asymptotic(double x) nogil:
    cdef double mu = 4.0
    cdef double p = 1.0, q = 0.0, term = 1.0, chi
    cdef int k
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) * (2 * k - 1)) / (k * 8.0 * x)
        if k % 2 == 1:
            if ((k - 1) // 2) % 2 == 0:
                q += term
            else:
                q -= term
        else:
            if (k // 2) % 2 == 0:
                p += term
            else:
                p -= term
    chi = x - 0.75 * M_PI
    return sqrt(2.0 / (M_PI * x)) * (p * cos(chi) - q * sin(chi))


def bessel_j1(x):
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr.ravel())
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise ValueError("bessel_j1 expects finite nonnegative arguments")
    out = np.empty_like(flat)
    cdef double[::1] xv = flat
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double v
    with nogil:
        for i in range(xv.shape[0]):
            v = xv[i]
            if v < SERIES_MAX:
                ov[i] = _j1_series(v)
            elif v >= ASYMPTOTIC_MIN:
                ov[i] = _j1_asymptotic(v)
            else:
                ov[i] = _j1_miller(v)
    return out.reshape(arr.shape)


def char_sums(X, w, int kmax, L):
    """S[k] = sum_i w_i exp(i pi <k, X_i> / (2 L)), k in {-kmax..kmax}^d."""
    Xa = np.ascontiguousarray(X, dtype=np.float64)
    wa = np.ascontiguousarray(w, dtype=np.complex128)
    La = np.ascontiguousarray(L, dtype=np.float64)
    cdef int n = Xa.shape[0]
    cdef int d = Xa.shape[1]
    cdef int K = 2 * kmax + 1
    cdef Py_ssize_t left_size = K ** (d - 1)
    out = np.zeros(left_size * K, dtype=np.complex128)
    cdef double[:, ::1] Xv = Xa
    cdef double complex[::1] wv = wa
    cdef double[::1] Lv = La
    cdef double complex[::1] outv = out
    tables = np.empty((d, CHUNK, K), dtype=np.complex128)
    left = np.empty((CHUNK, left_size), dtype=np.complex128)
    cdef double complex[:, :, ::1] tv = tables
    cdef double complex[:, ::1] lv = left
    cdef int start, c, i, ax, j, size, block
    cdef Py_ssize_t a
    cdef double theta
    cdef double complex alpha = 1.0, beta = 1.0
    cdef double complex wi
    cdef char transa = b'N', transb = b'T'
    cdef int m_, n_, ldp, ldq
    for start in range(0, n, CHUNK):
        c = min(CHUNK, n - start)
        with nogil:
            for i in range(c):
                for ax in range(d):
                    theta = M_PI / (2.0 * Lv[ax]) * Xv[start + i, ax]
                    for j in range(K):
                        tv[ax, i, j] = cos(theta * (j - kmax)) + 1j * sin(theta * (j - kmax))
            # left[i, :] = w_i * outer(tables[0..d-2]) flattened
            for i in range(c):
                wi = wv[start + i]
                if d == 1:
                    lv[i, 0] = wi
                    continue
                for j in range(K):
                    lv[i, j] = wi * tv[0, i, j]
                size = K
                for ax in range(1, d - 1):
                    # expand in place from the back so entries are not overwritten
                    a = size * K - 1
                    while a >= 0:
                        lv[i, a] = lv[i, a // K] * tv[ax, i, a % K]
                        a -= 1
                    size *= K
        # out (row-major left_size x K) += left^T @ tables[d-1]
        m_ = K
        n_ = <int>left_size
        ldp = K
        ldq = <int>left_size
        block = c
        zgemm(&transa, &transb, &m_, &n_, &block, &alpha, &tv[d - 1, 0, 0], &ldp,
              &lv[0, 0], &ldq, &beta, &outv[0], &m_)
    return out.reshape((K,) * d)


def wave_leapfrog(f0, f1, left, right, double r2, keep):
    """Three-level explicit scheme u+ = 2u - u- + r2 * D2 u."""
    cdef double[::1] lb = np.ascontiguousarray(left, dtype=np.float64)
    cdef double[::1] rb = np.ascontiguousarray(right, dtype=np.float64)
    cdef long[::1] kp = np.ascontiguousarray(keep, dtype=np.int64)
    cdef int l1 = lb.shape[0] - 1
    cdef int nx = len(f0)
    out = np.empty((kp.shape[0], nx))
    cdef double[:, ::1] ov = out
    buf = np.empty((3, nx))
    buf[0] = f0
    buf[1] = f1
    cdef double[:, ::1] b = buf
    cdef int p = 0, cu = 1, nt = 2, t, a, j, slot = 0
    while slot < kp.shape[0] and kp[slot] <= 1:
        ov[slot, :] = b[kp[slot], :]
        slot += 1
    with nogil:
        for a in range(1, l1):
            for j in range(1, nx - 1):
                b[nt, j] = (2.0 * b[cu, j] - b[p, j]
                            + r2 * (b[cu, j + 1] - 2.0 * b[cu, j] + b[cu, j - 1]))
            b[nt, 0] = lb[a + 1]
            b[nt, nx - 1] = rb[a + 1]
            if slot < kp.shape[0] and kp[slot] == a + 1:
                ov[slot, :] = b[nt, :]
                slot += 1
            t = p
            p = cu
            cu = nt
            nt = t
    return out


cdef inline void _lap(double[::1] f, double bl, double br, double scale,
                      double[::1] res) nogil:
    cdef int m = f.shape[0]
    cdef int j
    cdef double lo, hi
    for j in range(m):
        lo = f[j - 1] if j > 0 else bl
        hi = f[j + 1] if j < m - 1 else br
        res[j] = scale * (hi - 2.0 * f[j] + lo)


def wave_rk4(f0, g0, left, right, double l2, double c2, keep):
    """Classical RK4 on the system f' = g, g' = c2 * f_xx (interior nodes)."""
    cdef double[::1] lb = np.ascontiguousarray(left, dtype=np.float64)
    cdef double[::1] rb = np.ascontiguousarray(right, dtype=np.float64)
    cdef long[::1] kp = np.ascontiguousarray(keep, dtype=np.int64)
    cdef int l1 = lb.shape[0] - 1
    cdef int nx = len(f0)
    cdef int m = nx - 2
    cdef double dt = 1.0 / l1
    cdef double scale = c2 * l2 * l2
    out = np.empty((kp.shape[0], nx))
    cdef double[:, ::1] ov = out
    work = np.zeros((11, m))
    work[0] = np.asarray(f0, dtype=np.float64)[1:-1]
    work[1] = np.asarray(g0, dtype=np.float64)[1:-1]
    cdef double[::1] f = work[0], g = work[1]
    cdef double[::1] k1f = work[2], k1g = work[3], k2f = work[4], k2g = work[5]
    cdef double[::1] k3f = work[6], k3g = work[7], k4f = work[8], k4g = work[9]
    cdef double[::1] tmp = work[10]
    cdef int a, j, slot = 0
    cdef double bl0, br0, bl1, br1, blm, brm
    if slot < kp.shape[0] and kp[slot] == 0:
        out[0] = f0
        slot += 1
    with nogil:
        for a in range(l1):
            bl0 = lb[a]
            br0 = rb[a]
            bl1 = lb[a + 1]
            br1 = rb[a + 1]
            blm = 0.5 * (bl0 + bl1)
            brm = 0.5 * (br0 + br1)
            _lap(f, bl0, br0, scale, k1g)
            for j in range(m):
                k1f[j] = dt * g[j]
                k1g[j] = dt * k1g[j]
                tmp[j] = f[j] + 0.5 * k1f[j]
            _lap(tmp, blm, brm, scale, k2g)
            for j in range(m):
                k2f[j] = dt * (g[j] + 0.5 * k1g[j])
                k2g[j] = dt * k2g[j]
                tmp[j] = f[j] + 0.5 * k2f[j]
            _lap(tmp, blm, brm, scale, k3g)
            for j in range(m):
                k3f[j] = dt * (g[j] + 0.5 * k2g[j])
                k3g[j] = dt * k3g[j]
                tmp[j] = f[j] + k3f[j]
            _lap(tmp, bl1, br1, scale, k4g)
            for j in range(m):
                k4f[j] = dt * (g[j] + k3g[j])
                k4g[j] = dt * k4g[j]
                f[j] = f[j] + (k1f[j] + 2.0 * k2f[j] + 2.0 * k3f[j] + k4f[j]) / 6.0
                g[j] = g[j] + (k1g[j] + 2.0 * k2g[j] + 2.0 * k3g[j] + k4g[j]) / 6.0
            if slot < kp.shape[0] and kp[slot] == a + 1:
                ov[slot, 0] = bl1
                ov[slot, nx - 1] = br1
                for j in range(m):
                    ov[slot, j + 1] = f[j]
                slot += 1
    return out


def wave_crank_nicolson(f0, f1, left, right, double q, keep):
    """Implicit scheme (I - q D2) u+ = 2u - u- + q D2 u, factored once.

    The matrix is symmetric and strictly diagonally dominant, so the Thomas
    algorithm without pivoting is stable.
    """
    cdef double[::1] lb = np.ascontiguousarray(left, dtype=np.float64)
    cdef double[::1] rb = np.ascontiguousarray(right, dtype=np.float64)
    cdef long[::1] kp = np.ascontiguousarray(keep, dtype=np.int64)
    cdef int l1 = lb.shape[0] - 1
    cdef int nx = len(f0)
    cdef int m = nx - 2
    out = np.empty((kp.shape[0], nx))
    cdef double[:, ::1] ov = out
    # forward-elimination multipliers and pivots of the constant matrix
    fac = np.empty((2, m))
    cdef double[:, ::1] fv = fac
    cdef int j
    fv[1, 0] = 1.0 + 2.0 * q
    for j in range(1, m):
        fv[0, j] = -q / fv[1, j - 1]
        fv[1, j] = 1.0 + 2.0 * q + q * fv[0, j]
    if np.any(fac[1] <= 0):
        raise np.linalg.LinAlgError("tridiagonal factorisation failed")
    buf = np.empty((4, nx))
    buf[0] = f0
    buf[1] = f1
    cdef double[:, ::1] b = buf
    cdef double[::1] rhs = np.empty(m)
    cdef int p = 0, cu = 1, nt = 2, t, a, slot = 0
    while slot < kp.shape[0] and kp[slot] <= 1:
        ov[slot, :] = b[kp[slot], :]
        slot += 1
    with nogil:
        for a in range(1, l1):
            for j in range(m):
                rhs[j] = (2.0 * b[cu, j + 1] - b[p, j + 1]
                          + q * (b[cu, j + 2] - 2.0 * b[cu, j + 1] + b[cu, j]))
            rhs[0] += q * lb[a + 1]
            rhs[m - 1] += q * rb[a + 1]
            # forward sweep with the stored multipliers, then back substitution
            for j in range(1, m):
                rhs[j] -= fv[0, j] * rhs[j - 1]
            rhs[m - 1] /= fv[1, m - 1]
            j = m - 2
            while j >= 0:
                rhs[j] = (rhs[j] + q * rhs[j + 1]) / fv[1, j]
                j -= 1
            b[nt, 0] = lb[a + 1]
            b[nt, nx - 1] = rb[a + 1]
            for j in range(m):
                b[nt, j + 1] = rhs[j]
            if slot < kp.shape[0] and kp[slot] == a + 1:
                ov[slot, :] = b[nt, :]
                slot += 1
            t = p
            p = cu
            cu = nt
            nt = t
    return out
