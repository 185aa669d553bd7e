"""Independent reference computations shared by the test modules."""
import itertools

import numpy as np

from pikl.fourier import features

FD_STEP = 1e-3


def _stencil(order, h):
    # central differences: offsets and weights along one axis
    if order == 0:
        return [(0.0, 1.0)]
    if order == 1:
        return [(-h, -0.5 / h), (h, 0.5 / h)]
    if order == 2:
        return [(-h, 1 / h ** 2), (0.0, -2 / h ** 2), (h, 1 / h ** 2)]
    raise ValueError("stencils up to order 2 only")


def fd_operator(op, modes, Z, X, h=FD_STEP):
    """(D f_j)(X) for f_j = <Z[:, j], Phi(.)>, by finite differences of the synthesis."""
    out = np.zeros((len(X), Z.shape[1]), dtype=np.complex128)
    cache = {}
    for alpha, coeff in op.terms:
        for combo in itertools.product(*(_stencil(a, h) for a in alpha)):
            shift = tuple(c[0] for c in combo)
            w = coeff * np.prod([c[1] for c in combo])
            if shift not in cache:
                cache[shift] = np.conj(features(modes, X + np.array(shift))) @ Z
            out += w * cache[shift]
    return out


def mc_penalty(op, dom, modes, Z, samples=1_000_000, seed=0, chunk=100_000):
    """Monte Carlo estimate of int_dom |D f_j|^2 and its standard error, per column."""
    rng = np.random.default_rng(seed)
    lo, hi = dom.bounding_box()
    vol = float(np.prod(hi - lo))
    s1 = np.zeros(Z.shape[1])
    s2 = np.zeros(Z.shape[1])
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        X = lo + rng.random((take, dom.d)) * (hi - lo)
        X = X[dom.contains(X)]
        if len(X):
            v = np.abs(fd_operator(op, modes, Z, X)) ** 2
            s1 += v.sum(axis=0)
            s2 += (v ** 2).sum(axis=0)
        done += take
    mean = s1 / samples
    var = np.maximum(s2 / samples - mean ** 2, 0.0)
    return vol * mean, vol * np.sqrt(var / samples)


def mc_l2(dom, modes, Z, samples=1_000_000, seed=0):
    """Monte Carlo int_dom |f_j|^2 and its standard error."""
    from pikl.diffop import identity
    return mc_penalty(identity(dom.d), dom, modes, Z, samples, seed)


def sobolev_norm_sq(modes, z, s):
    """sum_k (1 + (|k|^2 / (2L)^2)^s) |z_k|^2, per-axis scaling."""
    k = modes.modes / (2.0 * np.asarray(modes.L))
    w = np.sum(k * k, axis=1) ** s
    return float(np.sum((1.0 + w) * np.abs(z) ** 2))


def random_coefficients(modes, count, rng, real=True):
    Z = rng.standard_normal((modes.size, count)) + 1j * rng.standard_normal((modes.size, count))
    if real:
        Z = 0.5 * (Z + np.conj(Z[::-1]))
    return Z
