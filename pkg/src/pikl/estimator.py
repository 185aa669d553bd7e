"""The physics-informed kernel estimator in feature space.

The fitted coefficients solve ``(A + n M) z = b`` with ``A = sum Phi Phi^*``
and ``b = sum Phi Y`` over the data, so that ``f(x) = <z, Phi(x)>``
minimises ``n^{-1} sum |f(X_i) - Y_i|^2 + z^* M z`` over the truncated space.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import _accel
from .fourier import ModeSet, features, synthesize
from .gram import GramSpec, HermitianMatrix, toeplitz_expand
from .precision import as_complex, as_real

log = logging.getLogger(__name__)


class FactorizationError(np.linalg.LinAlgError):
    """The Hermitian system could not be factored at float64 precision."""


class ImaginaryResidueError(FloatingPointError):
    pass


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    Y: np.ndarray

    def __init__(self, X, Y):
        X = as_real(X)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        Y = as_real(Y).reshape(-1)
        if X.ndim != 2 or len(X) != len(Y):
            raise ValueError("X must be (n, d) and Y must have n entries")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("data must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return len(self.Y)

    @property
    def d(self):
        return self.X.shape[1]

    def __add__(self, other):
        return Dataset(np.vstack([self.X, other.X]), np.concatenate([self.Y, other.Y]))


@dataclass(frozen=True)
class SufficientStats:
    """Online accumulation of Phi^* Phi and Phi^* Y.

    ``A`` is Toeplitz in the mode differences, so only the empirical
    characteristic sums ``moments[delta] = sum_i exp(i pi <delta, X_i> / 2L)``
    over delta in {-2m..2m}^d are stored; ``A`` is expanded on demand.
    """

    modes: ModeSet
    moments: np.ndarray
    b: np.ndarray
    n: int

    @classmethod
    def empty(cls, modes):
        shape = (4 * modes.m + 1,) * modes.d
        return cls(modes, np.zeros(shape, dtype=np.complex128),
                   np.zeros(modes.size, dtype=np.complex128), 0)

    @property
    def A(self):
        return self.modes.norm ** 2 * toeplitz_expand(self.moments, self.modes)

    def merge(self, other):
        if not self.modes.same_as(other.modes):
            raise ValueError("cannot merge statistics over different mode sets")
        return SufficientStats(self.modes, self.moments + other.moments,
                               self.b + other.b, self.n + other.n)

    __add__ = merge


def accumulate(stats, batch, backend=None):
    """Return ``stats`` updated with every point of ``batch``."""
    modes = stats.modes
    if batch.n == 0:
        return stats
    if batch.d != modes.d:
        raise ValueError("batch dimension does not match the mode set")
    kern = _accel.get_backend(backend)
    L = np.asarray(modes.L)
    X = np.ascontiguousarray(batch.X)
    ones = np.ones(batch.n, dtype=np.complex128)
    mom = np.asarray(kern.char_sums(X, ones, 2 * modes.m, L))
    yw = np.asarray(kern.char_sums(X, batch.Y.astype(np.complex128), modes.m, L))
    return SufficientStats(modes, stats.moments + mom,
                           stats.b + modes.norm * yw.ravel(), stats.n + batch.n)


def stats_from_data(modes, data, backend=None):
    return accumulate(SufficientStats.empty(modes), data, backend)


@dataclass(frozen=True)
class PiklModel:
    z_hat: np.ndarray
    spec: GramSpec
    solver: str = "cholesky"

    @property
    def modes(self):
        return self.spec.modes

    def predict(self, x, check=True):
        return predict(self, x, check=check)


def _solve_hpd(G, b):
    """Solve the Hermitian positive-definite system G z = b.

    The system is first equilibrated by its diagonal. Cholesky is tried
    first; for strongly physics-weighted problems (tiny lambda, huge mu) the
    scaled matrix can be numerically indefinite, in which case a pivoted LU
    factorisation is used instead. Returns (z, method).
    """
    diag = np.real(np.diag(G))
    if not np.all(diag > 0):
        raise FactorizationError(
            f"system has a non-positive diagonal entry ({diag.min():.3e})"
        )
    d = 1.0 / np.sqrt(diag)
    Gs = G * d[:, None]
    Gs *= d[None, :]
    rhs = d * b
    try:
        factor = linalg.cho_factor(Gs, lower=False, check_finite=False)
        return d * linalg.cho_solve(factor, rhs, check_finite=False), "cholesky"
    except linalg.LinAlgError:
        log.debug("Cholesky failed on the equilibrated system; using LU")
    lu, piv = linalg.lu_factor(Gs, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() == 0.0:
        raise FactorizationError(
            "LU factorisation hit an exactly zero pivot; increase lambda or reduce m"
        )
    return d * linalg.lu_solve((lu, piv), rhs, check_finite=False), "lu"


def real_pairing(size):
    """Unitary U whose columns pair each mode k with -k.

    Modes are ordered so that -k sits at index size-1-i. A coefficient
    vector is conjugate-symmetric (z_{-k} = conj z_k) exactly when U^* z is
    real, and every Hermitian matrix built from real data or a real
    operator becomes real symmetric in these coordinates.
    """
    U = np.zeros((size, size), dtype=np.complex128)
    r = np.sqrt(0.5)
    half = size // 2
    i = np.arange(half)
    j = size - 1 - i
    U[i, i], U[j, i] = r, r
    U[i, j], U[j, j] = 1j * r, -1j * r
    U[half, half] = 1.0
    return U


class PenaltyEigenbasis:
    """Eigenbasis of the PDE penalty whitened by the Sobolev weights.

    With W = diag(1 + w(k)) and W^{-1/2} Pen W^{-1/2} = Q diag(p) Q^*, every
    M = lam W + mu Pen equals B^{-*} diag(lam + mu p) B^{-1} for B = W^{-1/2} Q.
    Solving in these coordinates keeps the system well conditioned even
    when mu / lam is far beyond 1/eps, where forming A + n M directly loses
    all accuracy. Penalty eigenvalues below the float64 resolution of the
    penalty (size * eps * max p) are set to exactly zero.

    The decomposition is done in the real cos/sin coordinates of
    :func:`real_pairing`, so Q is real there and fitted coefficients are
    conjugate-symmetric to rounding, even inside the (large, degenerate)
    null space of the penalty.
    """

    def __init__(self, spec):
        from .gram import penalty_matrix, sobolev_weight
        self.spec = spec
        w = 1.0 + sobolev_weight(spec.modes, spec.s, spec.sobolev_scaling)
        scale = 1.0 / np.sqrt(w)
        pen = penalty_matrix(spec)
        pen *= scale[:, None]
        pen *= scale[None, :]
        U = real_pairing(spec.size)
        pen = (U.conj().T @ pen @ U).real
        pen = 0.5 * (pen + pen.T)
        p, Q = linalg.eigh(pen, check_finite=False)
        floor = max(p.max(), 0.0) * spec.size * np.finfo(np.float64).eps
        self.p = np.where(p < floor, 0.0, p)
        self.basis = scale[:, None] * (U @ Q)
        self.resolved = int(np.count_nonzero(self.p))

    def solve(self, stats, lam, mu, rtol=1e-8):
        D = 1.0 / np.sqrt(lam + mu * self.p)
        BD = self.basis * D[None, :]
        G = (BD.conj().T @ stats.A @ BD).real
        G = 0.5 * (G + G.T)
        G[np.diag_indices_from(G)] += stats.n
        rhs = (BD.conj().T @ stats.b).real
        try:
            v = linalg.cho_solve(linalg.cho_factor(G, check_finite=False), rhs,
                                 check_finite=False)
        except linalg.LinAlgError as exc:
            raise FactorizationError(f"eigenbasis system not positive definite: {exc}")
        rn = np.linalg.norm(rhs)
        resid = np.linalg.norm(G @ v - rhs)
        if rn > 0 and resid > rtol * rn:
            raise FactorizationError(
                f"eigenbasis solve residual {resid / rn:.2e} exceeds {rtol:.0e}"
            )
        return BD @ v

def fit(stats, M, spec=None, rtol=1e-8, solver="auto", basis=None):
    """Solve (A + n M) z = b.

    ``solver`` is "auto" (Cholesky, then LU, then the penalty eigenbasis if
    the residual check fails and a spec is known), "direct" (Cholesky then
    LU only) or "eigenbasis". The eigenbasis route needs ``spec`` and
    reuses ``basis`` when given.
    """
    if stats.n < 1:
        raise ValueError("need at least one observation")
    Mm = M.entries if isinstance(M, HermitianMatrix) else np.asarray(M)
    if Mm.shape != (stats.modes.size,) * 2:
        raise ValueError("matrix size does not match the mode set")
    if solver not in ("auto", "direct", "eigenbasis"):
        raise ValueError(f"unknown solver {solver!r}")
    if solver != "eigenbasis":
        G = stats.A
        G += stats.n * Mm
        z, method = _solve_hpd(G, stats.b)
        bnorm = np.linalg.norm(stats.b)
        resid = np.linalg.norm(G @ z - stats.b)
        if not (bnorm > 0 and resid > rtol * bnorm):
            return PiklModel(z, spec, method)
        if solver == "direct" or spec is None:
            raise FactorizationError(
                f"solve residual {resid / bnorm:.2e} exceeds tolerance {rtol:.0e} "
                f"({method}); the system is too ill-conditioned at float64"
            )
        log.info("direct solve residual %.1e; switching to the penalty eigenbasis",
                 resid / bnorm)
    if spec is None:
        raise ValueError("the eigenbasis solver needs the GramSpec")
    if basis is None:
        basis = PenaltyEigenbasis(spec)
    z = basis.solve(stats, spec.lam, spec.mu, rtol)
    return PiklModel(z, spec, "eigenbasis")


def predict(model, x, check=True, tol=1e-6):
    """Real part of <z, Phi(x)> at each point; checks the imaginary residue."""
    vals = synthesize(model.spec.modes, model.z_hat, x)
    if check:
        bad = np.abs(vals.imag) > tol * (1.0 + np.abs(vals.real))
        if np.any(bad):
            worst = float(np.max(np.abs(vals.imag)))
            raise ImaginaryResidueError(
                f"prediction has imaginary residue {worst:.2e}; the fitted "
                "coefficients are not conjugate-symmetric"
            )
    return vals.real


def fit_predictor(spec, data, M=None, backend=None, solver="auto"):
    """Convenience: assemble M (unless given), accumulate and fit."""
    from .gram import assemble_M
    if M is None:
        M = assemble_M(spec)
    stats = stats_from_data(spec.modes, data, backend)
    return fit(stats, M, spec=spec, solver=solver)


class KernelEvaluator:
    """K(x, y) = Phi(x)^* M^{-1} Phi(y) via one Cholesky factor of M."""

    def __init__(self, M):
        Mm = M.entries if isinstance(M, HermitianMatrix) else np.asarray(M)
        self.modes = M.modes if isinstance(M, HermitianMatrix) else None
        try:
            self.R = linalg.cholesky(Mm, lower=False, check_finite=False)
        except linalg.LinAlgError as exc:
            raise FactorizationError(f"M is not positive definite: {exc}") from exc

    def _whiten(self, modes, X):
        # R^{-*} Phi(x) for every row of X, as columns
        Phi = features(modes, X).T
        return linalg.solve_triangular(self.R, Phi, trans="C", lower=False,
                                       check_finite=False)

    def matrix(self, modes, X, Y=None):
        a = self._whiten(modes, X)
        b = a if Y is None else self._whiten(modes, Y)
        return a.conj().T @ b


def kernel_eval(spec, M, x, y):
    ev = KernelEvaluator(M)
    out = ev.matrix(spec.modes, as_real(x).reshape(1, -1), as_real(y).reshape(1, -1))
    return complex(out[0, 0])


def dual_predict(spec, M, data, xq):
    """Kernel-trick form (K(x, X_i))_i (K_XX + n I)^{-1} Y."""
    ev = KernelEvaluator(M)
    K = ev.matrix(spec.modes, data.X)
    Kq = ev.matrix(spec.modes, xq, data.X)
    alpha = np.linalg.solve(K + data.n * np.eye(data.n), data.Y.astype(np.complex128))
    return Kq @ alpha


def empirical_risk(z, spec, M, data):
    """n^{-1} sum |<z, Phi(X_i)> - Y_i|^2 + z^* M z."""
    z = as_complex(z)
    fx = synthesize(spec.modes, z, data.X)
    Mm = M.entries if isinstance(M, HermitianMatrix) else M
    return float(np.mean(np.abs(fx - data.Y) ** 2) + np.vdot(z, Mm @ z).real)
