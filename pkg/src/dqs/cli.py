"""Command-line driver: single spectra, figure reproductions and sweeps.

Usage examples::

    dqs spectrum --set drive.a=6.0 --out out/a6
    dqs fig1 --out out/fig1 --jobs 4
    dqs fig2 --out out/fig2 --a-min 1.5 --a-max 12 --a-step 0.25
    dqs sweep --key relax.eta --values 0 0.01 0.03 --set drive.a=6 --mode analytic

Exit codes: 0 success, 2 configuration error, 3 numerical convergence error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analytic import coherent_lines, derive, incoherent_spectrum
from .config import RunConfig, load_config
from .errors import ConfigError, ConvergenceError, ExtractionError, FitError
from .spectrum import extract_quasienergy, fit_incoherent_peaks, run_numeric, significant_harmonics

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

MODES = ("analytic", "numeric", "both")

# reference panels: (label, a, quoted sigma0)
FIG1_PANELS = (
    ("a", 6.0, -0.198),
    ("b", 12.0, -0.065),
    ("c", 8.6, 0.0),
    ("d", 5.0, 0.258),
    ("e", 9.0, 0.12),
)
FIG_GAMMA = 0.03
FIG_ETA = 0.0


def _num(x):
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("refusing to write a non-finite number")
    return format(x, ".15g")


def _json_safe(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("refusing to write NaN or infinity to JSON")
        return float(format(obj, ".15g"))
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_json(path, obj):
    _write_atomic(path, json.dumps(_json_safe(obj), indent=2, allow_nan=False) + "\n")


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if not isinstance(v, str) else v for v in row])
    _write_atomic(path, buf.getvalue())


def _pipelines(mode):
    return ("analytic", "numeric") if mode == "both" else (mode,)


def cmd_spectrum(cfg, mode, out_dir):
    """Write spectrum, line, peak and derived-parameter files for one config.

    Returns a summary dict used by the figure and sweep commands.
    """
    cfg.validate()
    out_dir = Path(out_dir)
    drive, relax = cfg.drive(), cfg.relax()
    d = derive(drive, relax)
    n_max = cfg.n_max(drive)
    grid = cfg.omega_grid(drive, relax)
    columns = {"Omega": grid}
    lines, peaks = [], []
    summary = {"a": drive.a, "derived": d, "eps_q_numeric": None, "max_peak_center_error": None}
    silent = drive.a == 0

    def fit_all(source, pipeline):
        found = [] if silent else fit_incoherent_peaks(source, drive, relax, significant_harmonics(drive, n_max), skip_failures=True)
        for p in found:
            peaks.append(dict(pipeline=pipeline, **p.to_dict()))
        return found

    for pipeline in _pipelines(mode):
        if pipeline == "analytic":
            columns["S_analytic"] = incoherent_spectrum(grid, drive, relax, n_max)[0].values
            for line in coherent_lines(drive, relax, n_max):
                if line.weight == 0:
                    continue
                lines.append(dict(pipeline="analytic", **line.to_dict()))
            found = fit_all(lambda w: incoherent_spectrum(w, drive, relax, n_max)[0], "analytic")
        else:
            run = run_numeric(drive, relax, cfg.integrator())
            columns["S_numeric"] = run.spectrum(grid).values
            for line in run.coherent_lines(n_max):
                lines.append(dict(pipeline="numeric", **line.to_dict()))
            found = fit_all(run.spectrum, "numeric")
            if found:
                try:
                    summary["eps_q_numeric"] = extract_quasienergy(found, drive.omega)
                except ExtractionError:
                    pass
        if found:
            errors = [abs(p.center - (2 * p.harmonic * drive.omega + d.eps_q)) for p in found]
            summary["max_peak_center_error"] = max(errors)

    if cfg["output.format"] == "csv":
        names = list(columns)
        _write_csv(out_dir / "spectrum_inc.csv", names, zip(*(columns[k] for k in names)))
    else:
        _write_json(out_dir / "spectrum_inc.json", {k: [float(v) for v in col] for k, col in columns.items()})
    _write_json(out_dir / "lines_coh.json", lines)
    _write_json(out_dir / "peaks.json", peaks)
    _write_json(out_dir / "derived.json", d.to_dict(drive.a))
    _write_atomic(out_dir / "resolved_config", cfg.dumps())
    return summary


def _spectrum_task(values, mode, out_dir):
    return cmd_spectrum(RunConfig(values), mode, out_dir)


def _quasienergy_task(values):
    cfg = RunConfig(values)
    drive, relax = cfg.drive(), cfg.relax()
    analytic = derive(drive, relax).eps_q
    try:
        run = run_numeric(drive, relax, cfg.integrator())
        peaks = fit_incoherent_peaks(run.spectrum, drive, relax, skip_failures=True)
        numeric = extract_quasienergy(peaks, drive.omega)
    except (ConvergenceError, FitError, ExtractionError) as exc:
        warnings.warn(f"a={drive.a:g}: {exc}", RuntimeWarning, stacklevel=1)
        numeric = None
    return drive.a, numeric, analytic


def _map(func, arg_lists, jobs):
    if jobs <= 1 or len(arg_lists) <= 1:
        return [func(*args) for args in arg_lists]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, *zip(*arg_lists)))


def cmd_fig1(cfg, mode, out_dir, jobs=1):
    """Run the five reference panels and write a summary table."""
    out_dir = Path(out_dir)
    tasks = []
    for label, a, _ in FIG1_PANELS:
        panel = cfg.with_overrides({"drive.a": a, "relax.gamma": FIG_GAMMA, "relax.eta": FIG_ETA})
        panel.validate()
        tasks.append((panel.values, mode, out_dir / f"panel_{label}"))
    results = _map(_spectrum_task, tasks, jobs)
    rows = []
    for (label, a, quoted), res in zip(FIG1_PANELS, results):
        rows.append((label, a, res["derived"].sigma0, quoted, res["max_peak_center_error"]))
    _write_csv(
        out_dir / "summary.csv",
        ["panel", "a", "sigma0_analytic", "sigma0_reference", "max_peak_center_error"],
        rows,
    )
    _write_atomic(out_dir / "resolved_config", cfg.with_overrides({"relax.gamma": FIG_GAMMA, "relax.eta": FIG_ETA}).dumps())
    return rows


def strength_values(a_min, a_max, a_step):
    if a_step <= 0:
        raise ConfigError("--a-step must be > 0")
    if a_max < a_min:
        raise ConfigError("--a-max must be >= --a-min")
    count = int(math.floor((a_max - a_min) / a_step + 1e-9)) + 1
    return [round(a_min + i * a_step, 12) for i in range(count)]


def cmd_fig2(cfg, out_dir, a_min=1.5, a_max=12.0, a_step=0.25, jobs=1):
    """Numeric versus analytic quasienergy over a range of drive strengths."""
    if a_min < 1.5:
        raise ConfigError(f"--a-min must be >= 1.5, got {a_min:g}")
    out_dir = Path(out_dir)
    points = []
    for a in strength_values(a_min, a_max, a_step):
        point = cfg.with_overrides({"drive.a": a})
        point.validate()
        points.append((point.values,))
    rows = _map(_quasienergy_task, points, jobs)
    _write_csv(out_dir / "quasienergy.csv", ["a", "eps_q_numeric", "eps_q_analytic"], rows)
    _write_atomic(out_dir / "resolved_config", cfg.with_overrides({"drive.a": a_min}).dumps())
    return rows


def cmd_sweep(cfg, key, values, mode, out_dir, jobs=1):
    """Run ``spectrum`` for each value of one scalar config key."""
    out_dir = Path(out_dir)
    tasks = []
    for value in values:
        point = cfg.with_overrides({key: str(value)})
        point.validate()
        tasks.append((point.values, mode, out_dir / f"{key}={value}"))
    results = _map(_spectrum_task, tasks, jobs)
    rows = []
    for value, res in zip(values, results):
        d = res["derived"]
        rows.append((str(value), res["a"], d.sigma0, d.eps_q, d.gamma_par_dressed, d.gamma_perp_dressed, res["eps_q_numeric"]))
    _write_csv(
        out_dir / "summary.csv",
        [key, "a", "sigma0", "eps_q", "Gamma_par", "Gamma_perp", "eps_q_numeric"],
        rows,
    )
    return rows


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'section.key = value' config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--mode", choices=MODES, default="both", help="which pipelines to run")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("DQS_JOBS", os.cpu_count() or 1)),
        help="worker processes for multi-point commands (default: $DQS_JOBS or core count)",
    )
    common.add_argument("--regression-term", choices=("paper", "consistent"), help="affine term of the correlation equations")

    parser = argparse.ArgumentParser(prog="dqs", description="Emission spectra of a strongly driven qubit.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="spectrum for one parameter point")
    sub.add_parser("fig1", parents=[common], help="the five reference panels (a = 6, 12, 8.6, 5, 9)")
    fig2 = sub.add_parser("fig2", parents=[common], help="quasienergy versus drive strength")
    fig2.add_argument("--a-min", type=float, default=1.5)
    fig2.add_argument("--a-max", type=float, default=12.0)
    fig2.add_argument("--a-step", type=float, default=0.25)
    sweep = sub.add_parser("sweep", parents=[common], help="grid over any scalar config key")
    sweep.add_argument("--key", required=True)
    group = sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--values", nargs="+")
    group.add_argument("--range", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.regression_term:
        overrides["integrator.regression_term"] = args.regression_term
    if args.out:
        overrides["output.directory"] = args.out
    return cfg.with_overrides(overrides) if overrides else cfg


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    warnings.showwarning = _show_warning
    try:
        cfg = _load(args)
        out = Path(cfg["output.directory"])
        jobs = max(1, args.jobs)
        if args.command == "spectrum":
            cmd_spectrum(cfg, args.mode, out)
        elif args.command == "fig1":
            cmd_fig1(cfg, args.mode, out, jobs)
        elif args.command == "fig2":
            cmd_fig2(cfg, out, args.a_min, args.a_max, args.a_step, jobs)
        else:
            if args.range:
                start, stop, step = args.range
                values = [format(v, ".12g") for v in np.arange(start, stop + 0.5 * step, step)]
            else:
                values = args.values
            cmd_sweep(cfg, args.key, values, args.mode, out, jobs)
    except ConfigError as exc:
        for line in str(exc).splitlines():
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
