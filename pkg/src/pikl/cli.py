"""Command-line front end.

    pikl run --scenario convection --beta 40 --seeds 1..5
    pikl run --config configs/wave.json
    pikl run --manifest out/manifest.json        # exact re-run
    pikl effdim --preset ddx --m 50 100 --n 100 1000 10000
    pikl spectrum --preset ddx --m 200 --lam 0.01 --mu 1
    pikl solve-wave --n 40000 --noise-sigma 0.1
    pikl inspect out/M.csv

Exit status: 0 on success, 2 for usage or configuration errors, 3 when a
numerical step fails. Every number printed to the terminal is read back
from a file the command wrote.
"""
import argparse
import csv
import hashlib
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _accel
from . import io as pio
from .bench import harness
from .bench.scenarios import gen_wave, uniform_grid, wave_solution
from .precision import PrecisionError, check_precision_name

log = logging.getLogger("pikl")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
DEFAULT_OUTPUT = "pikl-out"
OUTPUT_ENV = "PIKL_OUTPUT_DIR"

SCENARIO_KEYS = {"scenario", "ns", "n", "seeds", "m", "s", "lam", "mu", "beta", "L",
                 "L_t", "noise_sigma", "estimators", "grid_size", "weight_scale",
                 "precision"}


class ConfigError(ValueError):
    pass


def output_dir(args):
    path = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)
    path.mkdir(parents=True, exist_ok=True)
    return path


def load_config(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    return cfg


def _seeds(value):
    if value is None:
        return None
    if isinstance(value, str):
        try:
            return harness.parse_seeds(value)
        except ValueError as exc:
            raise ConfigError(f"bad seed list {value!r}: {exc}") from exc
    return tuple(int(v) for v in value)


def scenario_from(cfg, overrides):
    """Merge a config mapping with command-line overrides into a Scenario."""
    unknown = set(cfg) - SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    merged = dict(cfg)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    check_precision_name(merged.pop("precision", "float64"))
    name = merged.pop("scenario", None)
    if name is None:
        raise ConfigError("no scenario given (use --scenario or a config file)")
    if "n" in merged:
        n = merged.pop("n")
        merged["ns"] = n if isinstance(n, (list, tuple)) else [n]
    if "seeds" in merged:
        merged["seeds"] = _seeds(merged["seeds"])
    try:
        return harness.make_scenario(name, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def versions():
    return {"pikl": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__,
            "backend": _accel.BACKEND}


def write_manifest(out, command, config, seeds, threads, files):
    manifest = {
        "schema_version": harness.SCHEMA_VERSION,
        "command": command,
        "config": config,
        "config_hash": config_hash(config),
        "seeds": list(seeds),
        "threads": threads,
        "versions": versions(),
        "outputs": {Path(f).name: file_hash(f) for f in files},
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return path


def echo_csv(path, keep=None):
    """Print rows of a CSV we just wrote (optionally filtered)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    print(",".join(rows[0]))
    for row in rows[1:]:
        if keep is None or keep(dict(zip(rows[0], row))):
            print(",".join(row))


def _run_report(args, sc, command, prefix="report"):
    out = output_dir(args)
    threads = args.threads or harness.default_threads()
    report = harness.run_scenario(sc, threads=threads)
    csv_path = out / f"{prefix}.csv"
    json_path = out / f"{prefix}.json"
    report.to_csv(csv_path)
    report.to_json(json_path)
    manifest = write_manifest(out, command, sc.to_config(), sc.seeds, threads,
                              [csv_path, json_path])
    echo_csv(csv_path, keep=lambda r: r["seed"] == "aggregate")
    print(f"wrote {csv_path}, {json_path} and {manifest}")
    return report, out


def cmd_run(args):
    if args.manifest:
        man = load_config(args.manifest)
        if "config" not in man or man.get("command") not in ("run", "solve-wave"):
            raise ConfigError(f"{args.manifest} is not a run manifest")
        cfg = dict(man["config"])
        cfg["scenario"] = cfg.pop("name")
        if args.threads is None:
            args.threads = man.get("threads")
        sc = scenario_from(cfg, {})
        prefix = "solve_wave" if man["command"] == "solve-wave" else "report"
        _run_report(args, sc, man["command"], prefix)
        return 0
    cfg = load_config(args.config) if args.config else {}
    overrides = {
        "scenario": args.scenario, "beta": args.beta, "seeds": args.seeds,
        "ns": args.n, "m": args.m, "lam": args.lam, "mu": args.mu,
        "noise_sigma": args.noise_sigma, "L": args.L, "precision": args.precision,
        "estimators": args.estimators,
    }
    sc = scenario_from(cfg, overrides)
    _run_report(args, sc, "run")
    return 0


def cmd_solve_wave(args):
    cfg = load_config(args.config) if args.config else {}
    methods = cfg.pop("methods", None)
    methods = args.methods or methods or list(harness.ESTIMATORS["wave"])
    cfg.setdefault("scenario", "wave")
    if cfg["scenario"] != "wave":
        raise ConfigError("solve-wave only runs the wave scenario")
    overrides = {"ns": args.n, "noise_sigma": args.noise_sigma, "seeds": args.seeds,
                 "m": args.m, "estimators": list(methods), "precision": args.precision}
    sc = scenario_from(cfg, overrides)
    report, out = _run_report(args, sc, "solve-wave", prefix="solve_wave")
    if args.dump_grids:
        dump_wave_grids(sc, out)
    return 0


def dump_wave_grids(sc, out):
    """Predictions of every method on the test grid, first n and seed."""
    from . import classic
    from .domain import Cube, Scaled
    from .diffop import wave
    from .estimator import Dataset, fit_predictor
    from .fourier import ModeSet
    from .gram import GramSpec
    n, seed = sc.ns[0], sc.seeds[0]
    pts = uniform_grid((0.0, 0.0), (1.0, 1.0), sc.grid_size)
    for method in sc.estimators:
        if method == "pikl":
            modes = ModeSet(sc.m, 2, sc.L)
            dom = Cube(2, 0.5) if sc.L == 0.5 else Scaled(Cube(2, sc.L), 0.5 / sc.L)
            spec = GramSpec(modes, sc.s, sc.lam, sc.mu, wave(classic.C2), dom)
            data = gen_wave(n, seed, sc.noise_sigma)
            model = fit_predictor(spec, Dataset(data.X - 0.5, data.Y))
            vals = model.predict(pts - 0.5)
        else:
            l1, l2 = classic.split_grid(n)
            keep = classic.rows_for(l1, np.unique(pts[:, 0]))
            grid = classic.SOLVERS[method](l1, l2, classic.NoisySpec(sc.noise_sigma, seed),
                                           keep=keep)
            vals = grid.evaluate(pts[:, 0], pts[:, 1])
        path = out / f"grid_{method}.csv"
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "x", "value", "exact"])
            for (t, x), v in zip(pts, vals):
                wr.writerow([repr(float(t)), repr(float(x)), repr(float(v)),
                             repr(float(wave_solution(t, x)))])
        print(f"wrote {path}")


def _template(args):
    from .effdim import preset_template
    return preset_template(args.preset, args.m[0] if args.m else None)


def cmd_effdim(args):
    from .effdim import SCHEDULES, m_convergence_diagnostic, preset_template
    check_precision_name(args.precision)
    if args.schedule not in SCHEDULES:
        raise ConfigError(f"unknown schedule {args.schedule!r}")
    schedule = SCHEDULES[args.schedule]
    template = preset_template(args.preset)
    m_list = args.m or [template.modes.m]
    diag = m_convergence_diagnostic(template, m_list, args.n, schedule, args.tol)
    out = output_dir(args)
    csv_path = out / "effdim.csv"
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["schema_version", "preset", "m", "n", "lambda", "mu", "N_eff"])
        for m, n, val in diag.rows():
            lam, mu = schedule(n)
            wr.writerow([harness.SCHEMA_VERSION, args.preset, m, n, repr(lam),
                         repr(mu), repr(val)])
    slopes = {}
    if len(diag.n_list) > 1:
        for m in diag.m_list:
            vals = [diag.table[(m, n)] for n in diag.n_list]
            slopes[str(m)] = float(np.polyfit(np.log(diag.n_list), np.log(vals), 1)[0])
    summary = {"preset": args.preset, "schedule": args.schedule, "tol": args.tol,
               "m_star": diag.m_star, "loglog_slope": slopes}
    sum_path = out / "effdim_summary.json"
    sum_path.write_text(json.dumps(summary, indent=1) + "\n")
    echo_csv(csv_path)
    print(sum_path.read_text(), end="")
    return 0


def cmd_spectrum(args):
    from .effdim import (SCHEDULES, compute_spectrum, effective_dimension,
                         write_spectrum_csv)
    from .gram import assemble_C, assemble_M
    check_precision_name(args.precision)
    template = _template(args)
    if args.n is not None:
        lam, mu = SCHEDULES[args.schedule](args.n)
    else:
        lam, mu = args.lam, args.mu
    if lam is None or mu is None:
        raise ConfigError("give --n (schedule) or both --lam and --mu")
    spec = template.with_params(lam=lam, mu=mu)
    M, C = assemble_M(spec), assemble_C(spec)
    rep = compute_spectrum(spec, M, C)
    out = output_dir(args)
    path = out / "spectrum.csv"
    write_spectrum_csv(rep, path)
    summary = {"preset": args.preset, "m": spec.modes.m, "lambda": lam, "mu": mu,
               "N_eff": effective_dimension(rep),
               "top": [float(v) for v in rep.top(args.top)]}
    if args.dump_matrix:
        pio.save_matrix(M, out / "M.csv")
        pio.save_matrix(C, out / "C.csv")
        summary["matrices"] = ["M.csv", "C.csv"]
    sum_path = out / "spectrum_summary.json"
    sum_path.write_text(json.dumps(summary, indent=1) + "\n")
    print(sum_path.read_text(), end="")
    return 0


def cmd_inspect(args):
    path = Path(args.path)
    if not path.is_file():
        raise ConfigError(f"no such file: {path}")
    if path.suffix == ".json":
        info = load_config(path)
        if "outputs" in info:
            info["outputs_match"] = {
                name: (path.parent / name).is_file()
                and file_hash(path.parent / name) == digest
                for name, digest in info["outputs"].items()
            }
    else:
        try:
            info = pio.inspect(path)
        except (ValueError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    print(json.dumps(info, indent=1, sort_keys=True))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", help=f"output directory (env {OUTPUT_ENV}, "
                        f"default ./{DEFAULT_OUTPUT})")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: available CPUs; 1 is sequential)")
    common.add_argument("--precision", default="float64",
                        help="numeric precision; only float64 is accepted")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="pikl", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"pikl {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run a benchmark scenario")
    r.add_argument("--config", help="JSON scenario config")
    r.add_argument("--manifest", help="re-run exactly from a manifest.json")
    r.add_argument("--scenario", choices=sorted(harness.DEFAULTS))
    r.add_argument("--beta", type=float)
    r.add_argument("--seeds", help='"1..10", "1,2,5" or a single seed')
    r.add_argument("--n", type=int, nargs="+")
    r.add_argument("--m", type=int)
    r.add_argument("--lam", type=float)
    r.add_argument("--mu", type=float)
    r.add_argument("--noise-sigma", type=float)
    r.add_argument("--L", type=float, help="wave: half-width of the Fourier box")
    r.add_argument("--estimators", nargs="+")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("effdim", parents=[common], help="effective-dimension sweep")
    e.add_argument("--preset", default="ddx", choices=["ddx", "oscillator", "heat_disk"])
    e.add_argument("--m", type=int, nargs="+", help="one or more truncation levels")
    e.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10000])
    e.add_argument("--schedule", default="log")
    e.add_argument("--tol", type=float, default=0.01)
    e.set_defaults(func=cmd_effdim)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues of C M^-1 C")
    s.add_argument("--preset", default="ddx", choices=["ddx", "oscillator", "heat_disk"])
    s.add_argument("--m", type=int, nargs=1)
    s.add_argument("--n", type=int, help="take lambda, mu from the schedule at n")
    s.add_argument("--schedule", default="log")
    s.add_argument("--lam", type=float)
    s.add_argument("--mu", type=float)
    s.add_argument("--top", type=int, default=10)
    s.add_argument("--dump-matrix", action="store_true", help="also write M.csv, C.csv")
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("solve-wave", parents=[common],
                       help="PIKL against finite-difference schemes on the wave equation")
    w.add_argument("--config", help="JSON config (keys as for run, plus methods)")
    w.add_argument("--n", type=int, nargs="+")
    w.add_argument("--noise-sigma", type=float)
    w.add_argument("--seeds")
    w.add_argument("--m", type=int)
    w.add_argument("--methods", nargs="+", help="subset of: pikl euler rk4 cn")
    w.add_argument("--dump-grids", action="store_true")
    w.set_defaults(func=cmd_solve_wave)

    i = sub.add_parser("inspect", parents=[common],
                       help="describe a matrix/model dump or a manifest")
    i.add_argument("path")
    i.set_defaults(func=cmd_inspect)
    return p


def _numeric(exc):
    seen = exc
    while seen is not None:
        if isinstance(seen, (np.linalg.LinAlgError, ArithmeticError)):
            return True
        seen = seen.__cause__
    return False


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        check_precision_name(args.precision)
        return args.func(args)
    except PrecisionError as exc:
        print(f"pikl: precision error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except harness.ScenarioError as exc:
        print(f"pikl: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if _numeric(exc) else EXIT_CONFIG
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"pikl: numerical failure ({type(exc).__module__}): {exc}",
              file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"pikl: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
