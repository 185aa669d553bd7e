"""Scenario orchestration: generate data, fit PIKL and baselines, score.

A :class:`Scenario` names one experiment and pins its hyperparameters;
:func:`run_scenario` sweeps it over ``ns`` x ``seeds`` and returns a
:class:`RunReport` that writes long-format CSV and JSON. Cells are
independent, so seeds of one n run on a thread pool; results are collected
in (n, seed) order, which keeps reports identical for any thread count.
"""
import csv
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import classic
from ..diffop import convection, harmonic_oscillator, heat, wave
from ..domain import Cube, Product, Scaled, Torus
from ..estimator import PenaltyEigenbasis, fit, predict, stats_from_data
from ..fourier import ModeSet
from ..gram import GramSpec, assemble_M
from . import scenarios as gen
from .metrics import l2_relative_error, mean_std, squared_l2_error

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = ["schema_version", "scenario", "estimator", "n", "seed", "m",
               "lambda", "mu", "metric", "error", "std"]


class ScenarioError(RuntimeError):
    """A component failed inside a scenario; the message carries the cell."""


# hyperparameters not fixed by the experiment description are tuned
# values; every report records the values actually used
DEFAULTS = {
    "oscillator": dict(ns=(32, 100, 316, 1000), seeds=(1, 2, 3, 4, 5), m=300, s=2,
                       lam=1e-8, mu=1e2, noise_sigma=gen.OSC_SIGMA,
                       estimators=("pikl", "ols"), grid_size=2001),
    "heat_hybrid": dict(ns=(32, 100, 316, 1000, 3162), seeds=(1, 2, 3, 4, 5), m=15,
                        s=2, noise_sigma=gen.HEAT_SIGMA,
                        estimators=("pikl", "sobolev", "pde"), grid_size=101,
                        weight_scale=(4 * np.pi) ** -2),
    "convection": dict(ns=(100,), seeds=(1, 2, 3, 4, 5), m=20, s=2, lam=1e-12,
                       mu=1e2, beta=40.0, L_t=0.5, estimators=("pikl",),
                       grid_size=101),
    "wave": dict(ns=(10_000,), seeds=(1, 2, 3, 4, 5), m=20, s=2, lam=1e-8, mu=1e-3,
                 L=0.5, noise_sigma=0.0, estimators=("pikl",), grid_size=101),
}

# noisy wave data need a stronger ridge than the exact-data default
NOISY_WAVE = dict(lam=5e-7, mu=1e-2)

CLASSIC_METHODS = tuple(classic.SOLVERS)
ESTIMATORS = {
    "oscillator": ("pikl", "ols"),
    "heat_hybrid": ("pikl", "sobolev", "pde"),
    "convection": ("pikl",),
    "wave": ("pikl",) + CLASSIC_METHODS,
}


@dataclass
class Scenario:
    name: str
    ns: tuple
    seeds: tuple
    m: int
    s: int = 2
    lam: float = None
    mu: float = None
    beta: float = None
    L: float = None
    L_t: float = None
    noise_sigma: float = 0.0
    estimators: tuple = ("pikl",)
    grid_size: int = 101
    weight_scale: float = None

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise ValueError(f"unknown scenario {self.name!r}")
        self.ns = tuple(int(n) for n in self.ns)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.estimators = tuple(self.estimators)
        if not self.ns or not self.seeds:
            raise ValueError("a scenario needs at least one n and one seed")
        bad = [e for e in self.estimators if e not in ESTIMATORS[self.name]]
        if bad:
            raise ValueError(
                f"unknown estimator(s) {bad} for {self.name}; "
                f"choose from {list(ESTIMATORS[self.name])}"
            )
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be >= 0")

    def to_config(self):
        out = asdict(self)
        out["ns"] = list(self.ns)
        out["seeds"] = list(self.seeds)
        out["estimators"] = list(self.estimators)
        return out


def make_scenario(name, **overrides):
    """Scenario ``name`` with its defaults, updated by non-None ``overrides``."""
    if name not in DEFAULTS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(DEFAULTS)}")
    cfg = dict(DEFAULTS[name])
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if name == "wave" and cfg.get("noise_sigma", 0) > 0:
        for k, v in NOISY_WAVE.items():
            if overrides.get(k) is None:
                cfg[k] = v
    return Scenario(name=name, **cfg)


@dataclass
class RunReport:
    scenario: Scenario
    rows: list = field(default_factory=list)
    timings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def estimators(self):
        return list(dict.fromkeys(r["estimator"] for r in self.rows))

    def aggregate(self):
        """Mean and sample std over seeds for every (estimator, n)."""
        out = []
        for est in self.estimators():
            for n in self.scenario.ns:
                cell = [r for r in self.rows if r["estimator"] == est and r["n"] == n]
                if not cell:
                    continue
                mean, std = mean_std([r["error"] for r in cell])
                first = cell[0]
                out.append(dict(first, seed="aggregate", error=mean, std=std,
                                count=len(cell)))
        return out

    def curve(self, estimator):
        """(ns, mean errors) for one estimator."""
        agg = [a for a in self.aggregate() if a["estimator"] == estimator]
        return (np.array([a["n"] for a in agg], dtype=np.float64),
                np.array([a["error"] for a in agg]))

    def mean_error(self, estimator, n=None):
        n = self.scenario.ns[-1] if n is None else n
        for a in self.aggregate():
            if a["estimator"] == estimator and a["n"] == n:
                return a["error"]
        raise KeyError((estimator, n))

    def csv_rows(self):
        for r in list(self.rows) + self.aggregate():
            std = r.get("std")
            yield [SCHEMA_VERSION, self.scenario.name, r["estimator"], r["n"],
                   r["seed"], r["m"], _num(r["lam"]), _num(r["mu"]), r["metric"],
                   _num(r["error"]), "" if std is None else _num(std)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(CSV_COLUMNS)
            wr.writerows(self.csv_rows())

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario.to_config(),
            "rows": self.rows,
            "aggregate": self.aggregate(),
            "meta": self.meta,
            "timings": self.timings,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, default=_jsonable)
            fh.write("\n")


def _num(v):
    return "" if v is None else repr(float(v))


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _row(est, n, seed, m, lam, mu, metric, error):
    return {"estimator": est, "n": int(n), "seed": int(seed), "m": m,
            "lam": None if lam is None else float(lam),
            "mu": None if mu is None else float(mu),
            "metric": metric, "error": float(error)}


class _Timer:
    def __init__(self):
        self.phases = {}

    def __call__(self, phase):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[phase] = (timer.phases.get(phase, 0.0)
                                       + time.perf_counter() - self.t0)
        return _Ctx()


def _fit_and_score(spec, M, stats, pts, truth, score, basis=None, solver="auto"):
    t = _Timer()
    with t("fit"):
        model = fit(stats, M, spec=spec, solver=solver, basis=basis)
    with t("predict"):
        pred = predict(model, pts)
    return score(pred, truth), model.solver, t.phases


# each runner: prepare(sc) -> shared context; cell(sc, ctx, n, seed) -> rows

class _Oscillator:
    metric = "mse"

    def prepare(self, sc):
        L = np.pi
        modes = ModeSet(sc.m, 1, L)
        spec = GramSpec(modes, sc.s, sc.lam, sc.mu, harmonic_oscillator(), Cube(1, L))
        t0 = time.perf_counter()
        M = assemble_M(spec) if "pikl" in sc.estimators else None
        pts = np.linspace(-L, L, sc.grid_size)
        return dict(spec=spec, M=M, pts=pts, truth=gen.osc_f1(pts),
                    assembly=time.perf_counter() - t0)

    def cell(self, sc, ctx, n, seed):
        data = gen.gen_oscillator(n, sc.noise_sigma, seed)
        rows, times = [], {}
        if "pikl" in sc.estimators:
            stats = stats_from_data(ctx["spec"].modes, data)
            err, _, ph = _fit_and_score(ctx["spec"], ctx["M"], stats, ctx["pts"],
                                        ctx["truth"], squared_l2_error)
            rows.append(_row("pikl", n, seed, sc.m, sc.lam, sc.mu, self.metric, err))
            times["pikl"] = ph
        if "ols" in sc.estimators:
            t0 = time.perf_counter()
            a1, a2 = gen.ols_oscillator(data)
            pred = a1 * gen.osc_f1(ctx["pts"]) + a2 * gen.osc_f2(ctx["pts"])
            err = squared_l2_error(pred, ctx["truth"])
            rows.append(_row("ols", n, seed, None, None, None, self.metric, err))
            times["ols"] = {"fit": time.perf_counter() - t0}
        return rows, times


class _HeatHybrid:
    """PIKL against the Sobolev (mu = 0) and pure-PDE baselines.

    ``weight_scale`` multiplies every (lambda, mu) pair, including the PDE
    baseline, and equals (4L)^{-d} by default: it converts the schedules,
    stated for unnormalised Fourier features, to the normalised features
    used here.
    """

    metric = "mse"
    L = np.pi

    def schedules(self, sc, n):
        c = 1.0 if sc.weight_scale is None else sc.weight_scale
        lam = c * n ** (-2.0 / 3.0) / 10
        return {
            "pikl": (lam, c * 100.0 / n),
            "sobolev": (lam, 0.0),
            "pde": (c * 1e-10, c * 1e10),
        }

    def spec(self, sc, modes, lam, mu):
        return GramSpec(modes, sc.s, lam, mu, heat(), Cube(2, self.L))

    def prepare(self, sc):
        modes = ModeSet(sc.m, 2, self.L)
        pts = gen.uniform_grid((-self.L,) * 2, (self.L,) * 2, sc.grid_size)
        ctx = dict(modes=modes, pts=pts, truth=gen.heat_target(pts[:, 0], pts[:, 1]),
                   mats={}, basis=None)
        t0 = time.perf_counter()
        for n in sc.ns:
            for est, (lam, mu) in self.schedules(sc, n).items():
                if est in sc.estimators and est != "pde":
                    spec = self.spec(sc, modes, lam, mu)
                    ctx["mats"][(est, n)] = (spec, assemble_M(spec))
        if "pde" in sc.estimators:
            lam, mu = self.schedules(sc, sc.ns[0])["pde"]
            spec = self.spec(sc, modes, lam, mu)
            ctx["pde_spec"] = spec
            ctx["basis"] = PenaltyEigenbasis(spec)
        ctx["assembly"] = time.perf_counter() - t0
        return ctx

    def cell(self, sc, ctx, n, seed):
        data = gen.gen_heat_hybrid(n, seed, sc.noise_sigma)
        stats = stats_from_data(ctx["modes"], data)
        rows, times = [], {}
        sched = self.schedules(sc, n)
        for est in sc.estimators:
            lam, mu = sched[est]
            if est == "pde":
                spec = ctx["pde_spec"]
                err, _, ph = _fit_and_score(spec, spec_M_placeholder(spec), stats,
                                            ctx["pts"], ctx["truth"], squared_l2_error,
                                            basis=ctx["basis"], solver="eigenbasis")
            else:
                spec, M = ctx["mats"][(est, n)]
                err, _, ph = _fit_and_score(spec, M, stats, ctx["pts"], ctx["truth"],
                                            squared_l2_error)
            rows.append(_row(est, n, seed, sc.m, lam, mu, self.metric, err))
            times[est] = ph
        return rows, times

    def finish(self, sc, ctx, report):
        if "pde" in sc.estimators:
            report.meta["pde_projection_error"] = heat_projection_error(
                sc, ctx["pde_spec"], ctx["basis"], ctx["pts"], ctx["truth"])
        d2, f2 = gen.heat_norms()
        report.meta["residual_norm_sq"] = d2
        report.meta["target_norm_sq"] = f2


def spec_M_placeholder(spec):
    # the eigenbasis route never touches M; a zero matrix of the right size
    # keeps fit's shape check meaningful
    return np.zeros((spec.size, spec.size), dtype=np.complex128)


def heat_projection_error(sc, spec, basis, pts, truth, size=201):
    """MSE of the PDE estimator fitted to noiseless data on a dense grid.

    This approximates the L2 distance from f* to the functions the PDE
    baseline can represent, i.e. the floor its error converges to.
    """
    from ..estimator import Dataset
    L = _HeatHybrid.L
    X = gen.uniform_grid((-L,) * 2, (L,) * 2, size)
    data = Dataset(X, gen.heat_target(X[:, 0], X[:, 1]))
    stats = stats_from_data(spec.modes, data)
    model = fit(stats, spec_M_placeholder(spec), spec=spec, solver="eigenbasis",
                basis=basis)
    return squared_l2_error(predict(model, pts), truth)


class _Convection:
    """Initial-value problem on a periodic x-axis; time axis on a cube."""

    metric = "l2_relative"

    def prepare(self, sc):
        Lt, Lx = sc.L_t, np.pi / 2
        modes = ModeSet(sc.m, 2, (Lt, Lx))
        dom = Product(Cube(1, Lt), Torus(1, Lx))
        spec = GramSpec(modes, sc.s, sc.lam, sc.mu, convection(sc.beta), dom)
        t0 = time.perf_counter()
        M = assemble_M(spec)
        pts = gen.uniform_grid((0.0, 0.0), (1.0, 2 * np.pi), sc.grid_size)
        truth = gen.convection_solution(sc.beta, pts[:, 0], pts[:, 1])
        return dict(spec=spec, M=M, pts=pts - gen.CONVECTION_SHIFT, truth=truth,
                    assembly=time.perf_counter() - t0)

    def cell(self, sc, ctx, n, seed):
        data = gen.gen_convection(n, seed)
        from ..estimator import Dataset
        data = Dataset(data.X - gen.CONVECTION_SHIFT, data.Y)
        stats = stats_from_data(ctx["spec"].modes, data)
        err, _, ph = _fit_and_score(ctx["spec"], ctx["M"], stats, ctx["pts"],
                                    ctx["truth"], l2_relative_error)
        return [_row("pikl", n, seed, sc.m, sc.lam, sc.mu, self.metric, err)], {"pikl": ph}


class _Wave:
    """PIKL on the recentred unit square, plus the finite-difference schemes."""

    metric = "l2_relative"

    def prepare(self, sc):
        L = sc.L
        ctx = {}
        t0 = time.perf_counter()
        if "pikl" in sc.estimators:
            modes = ModeSet(sc.m, 2, L)
            dom = Cube(2, 0.5) if L == 0.5 else Scaled(Cube(2, L), 0.5 / L)
            spec = GramSpec(modes, sc.s, sc.lam, sc.mu, wave(classic.C2), dom)
            ctx.update(spec=spec, M=assemble_M(spec))
        pts = gen.uniform_grid((0.0, 0.0), (1.0, 1.0), sc.grid_size)
        ctx.update(pts=pts - 0.5, truth=gen.wave_solution(pts[:, 0], pts[:, 1]),
                   assembly=time.perf_counter() - t0)
        return ctx

    def cell(self, sc, ctx, n, seed):
        rows, times = [], {}
        if "pikl" in sc.estimators:
            from ..estimator import Dataset
            data = gen.gen_wave(n, seed, sc.noise_sigma)
            data = Dataset(data.X - 0.5, data.Y)
            stats = stats_from_data(ctx["spec"].modes, data)
            err, _, ph = _fit_and_score(ctx["spec"], ctx["M"], stats, ctx["pts"],
                                        ctx["truth"], l2_relative_error)
            rows.append(_row("pikl", n, seed, sc.m, sc.lam, sc.mu, self.metric, err))
            times["pikl"] = ph
        noisy = classic.NoisySpec(sc.noise_sigma, seed)
        for method in sc.estimators:
            if method not in classic.SOLVERS:
                continue
            t0 = time.perf_counter()
            l1, l2 = classic.split_grid(n)
            err = classic.solver_error(method, l1, l2, noisy, sc.grid_size)
            rows.append(_row(method, n, seed, None, None, None, self.metric, err))
            times[method] = {"solve": time.perf_counter() - t0}
        return rows, times


RUNNERS = {
    "oscillator": _Oscillator(),
    "heat_hybrid": _HeatHybrid(),
    "convection": _Convection(),
    "wave": _Wave(),
}


def default_threads():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (
        os.cpu_count() or 1)


def run_scenario(sc, threads=None):
    """Run every (n, seed) cell of ``sc``; deterministic for any ``threads``."""
    runner = RUNNERS[sc.name]
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    report = RunReport(sc)
    try:
        ctx = runner.prepare(sc)
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        raise ScenarioError(f"{sc.name}: assembly failed: {exc}") from exc
    report.timings.append({"phase": "assembly", "seconds": ctx.get("assembly", 0.0)})

    def one(n, seed):
        try:
            return runner.cell(sc, ctx, n, seed)
        except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
            raise ScenarioError(f"{sc.name} n={n} seed={seed}: {exc}") from exc

    cells = [(n, seed) for n in sc.ns for seed in sc.seeds]
    if threads == 1:
        results = [one(n, seed) for n, seed in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: one(*c), cells))
    for (n, seed), (rows, times) in zip(cells, results):
        report.rows.extend(rows)
        for est, phases in times.items():
            report.timings.append({"estimator": est, "n": n, "seed": seed, **phases})
    if hasattr(runner, "finish"):
        runner.finish(sc, ctx, report)
    report.meta["estimators"] = list(sc.estimators)
    log.info("%s: %d rows", sc.name, len(report.rows))
    return report


def slope(report, estimator, first=None, last=None):
    """Log-log slope of the mean error curve, optionally over a sub-range of n."""
    ns, errs = report.curve(estimator)
    sel = slice(first, last)
    x, y = np.log(ns[sel]), np.log(errs[sel])
    if len(x) < 2:
        raise ValueError("need at least two n values for a slope")
    return float(np.polyfit(x, y, 1)[0])


def parse_seeds(text):
    """"1..10" -> 1..10 inclusive; "1,4,9" -> those; "7" -> (7,)."""
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
        a, b = int(a), int(b)
        if b < a:
            raise ValueError(f"empty seed range {text!r}")
        return tuple(range(a, b + 1))
    return tuple(int(t) for t in text.split(",") if t.strip())


def log_grid(lo_exp, hi_exp, step=0.5):
    """Rounded 10^e for e from lo_exp to hi_exp in steps (inclusive)."""
    count = int(round((hi_exp - lo_exp) / step)) + 1
    return tuple(int(round(10 ** (lo_exp + i * step))) for i in range(count))


__all__ = ["Scenario", "RunReport", "ScenarioError", "make_scenario", "run_scenario",
           "slope", "parse_seeds", "log_grid", "heat_projection_error"]
