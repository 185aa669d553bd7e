"""Spectrum of C M^{-1} C and the effective dimension sum s / (1 + s).

With M = R^* R (Cholesky), S = R^{-*} C satisfies S^* S = C M^{-1} C, so the
spectrum is obtained as squared singular values of S. This keeps every
eigenvalue real and nonnegative in floating point.
"""
import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .fourier import ModeSet
from .gram import GramSpec, assemble_C, assemble_M

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    m: int
    spec: object

    def top(self, k):
        return self.eigenvalues[:k]


def _cholesky_upper(M):
    try:
        return linalg.cholesky(M, lower=False, check_finite=False)
    except linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"M is not numerically positive definite: {exc}")


def compute_spectrum(spec, M=None, C=None):
    """Eigenvalues of C M^{-1} C, sorted in decreasing order."""
    M = assemble_M(spec) if M is None else M
    C = assemble_C(spec) if C is None else C
    R = _cholesky_upper(M.entries)
    S = linalg.solve_triangular(R, C.entries, trans="C", lower=False,
                                check_finite=False)
    sv = linalg.svd(S, compute_uv=False, check_finite=False, lapack_driver="gesdd")
    ev = np.sort(sv ** 2)[::-1]
    ev[ev < 0] = 0.0
    return SpectrumReport(ev, spec.modes.m, spec)


def spectrum_direct(spec):
    """Eigenvalues of the explicitly formed C M^{-1} C (for cross-checks)."""
    M = assemble_M(spec).entries
    C = assemble_C(spec).entries
    prod = C @ linalg.solve(M, C, assume_a="her")
    prod = 0.5 * (prod + prod.conj().T)
    ev = np.sort(linalg.eigvalsh(prod))[::-1]
    return np.where(ev < 0, 0.0, ev)


def effective_dimension(report):
    """sum_k s_k / (1 + s_k); a zero eigenvalue contributes 0."""
    ev = np.asarray(getattr(report, "eigenvalues", report), dtype=np.float64)
    if np.any(ev < 0):
        raise ValueError("eigenvalues must be nonnegative")
    return float(np.sum(ev / (1.0 + ev)))


def log_schedule(n):
    """lambda = log(n)/n, mu = 1/log(n)."""
    return math.log(n) / n, 1.0 / math.log(n)


SCHEDULES = {
    "log": log_schedule,
}


@dataclass
class EffDimCurve:
    points: list = field(default_factory=list)

    def add(self, n, lam, mu, value, m):
        self.points.append((n, lam, mu, value, m))

    def ns(self):
        return np.array([p[0] for p in self.points], dtype=np.float64)

    def values(self):
        return np.array([p[3] for p in self.points], dtype=np.float64)

    def slope(self):
        """Least-squares slope of log N against log n."""
        return float(np.polyfit(np.log(self.ns()), np.log(self.values()), 1)[0])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["m", "n", "lambda", "mu", "N_eff"])
            for n, lam, mu, val, m in self.points:
                wr.writerow([m, n, repr(lam), repr(mu), repr(val)])


def effdim_curve(template, ns, schedule=log_schedule):
    """N(lambda_n, mu_n) for each n, with ``template`` fixing modes/op/domain."""
    curve = EffDimCurve()
    for n in ns:
        lam, mu = schedule(n)
        spec = template.with_params(lam=lam, mu=mu)
        val = effective_dimension(compute_spectrum(spec))
        curve.add(int(n), lam, mu, val, spec.modes.m)
    return curve


def with_m(template, m):
    modes = ModeSet(m, template.modes.d, template.modes.L, template.modes.budget)
    return template.with_params(modes=modes)


@dataclass
class MConvergence:
    table: dict
    m_list: list
    n_list: list
    m_star: object
    tol: float

    def rows(self):
        for m in self.m_list:
            for n in self.n_list:
                yield m, n, self.table[(m, n)]


def m_convergence_diagnostic(template, m_list, n_list, schedule=log_schedule, tol=0.01):
    """N for every (m, n); m* is the first m whose successor changes N by <= tol.

    The relative change is measured at the largest n. With fewer than two m
    values no m* can be reported.
    """
    m_list = sorted(int(m) for m in m_list)
    n_list = sorted(int(n) for n in n_list)
    table = {}
    for m in m_list:
        t = with_m(template, m)
        for n in n_list:
            lam, mu = schedule(n)
            table[(m, n)] = effective_dimension(
                compute_spectrum(t.with_params(lam=lam, mu=mu)))
    m_star = None
    if len(m_list) < 2:
        log.warning("a single m value was given; no m* can be reported")
    else:
        big = n_list[-1]
        for a, b in zip(m_list, m_list[1:]):
            prev, cur = table[(a, big)], table[(b, big)]
            if abs(cur - prev) <= tol * abs(cur):
                m_star = a
                break
    return MConvergence(table, m_list, n_list, m_star, tol)


def sandwich_bounds(k, lam, mu):
    """Known bounds on the k-th eigenvalue for d/dx on [-pi, pi]: (lower, upper)."""
    k = np.asarray(k, dtype=np.float64)
    return 4.0 / ((lam + mu) * (k + 4) ** 2), 4.0 / ((lam + mu) * (k - 2) ** 2)


def write_spectrum_csv(report, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["k", "eigenvalue"])
        for i, v in enumerate(report.eigenvalues, start=1):
            wr.writerow([i, repr(float(v))])


def preset_template(name, m=None):
    """GramSpec templates for the effective-dimension studies.

    ``ddx`` and ``oscillator`` live on [-pi, pi]; ``heat_disk`` is the heat
    operator on the disk of radius pi. lambda and mu are placeholders that
    the schedule overwrites.
    """
    from .diffop import ddx, harmonic_oscillator, heat
    from .domain import Ball2D, Cube
    L = math.pi
    if name == "ddx":
        return GramSpec(ModeSet(100 if m is None else m, 1, L), 1, 1.0, 1.0,
                        ddx(), Cube(1, L))
    if name == "oscillator":
        return GramSpec(ModeSet(100 if m is None else m, 1, L), 2, 1.0, 1.0,
                        harmonic_oscillator(), Cube(1, L))
    if name == "heat_disk":
        return GramSpec(ModeSet(30 if m is None else m, 2, L), 2, 1.0, 1.0,
                        heat(), Ball2D(L))
    raise ValueError(f"unknown effective-dimension preset {name!r}; "
                     f"choose from {sorted(PRESETS)}")


PRESETS = ("ddx", "oscillator", "heat_disk")
