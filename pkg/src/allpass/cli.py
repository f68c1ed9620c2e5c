"""``allpass`` command-line front end: figure datasets, traces and fitting.

Global options (``--config``, ``--seed``, ``--out``, ``--jobs``,
``--validate``) may be given before or after the subcommand. CSV output
uses a header row and 9 significant digits; without ``--out`` single-file
commands write to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .cmt import s21_trace
from .config import ConfigError, load_config
from .estimator import AllPassFitter
from .exceptions import AllPassError, FitError, LabelingAmbiguityError, NonConvergenceError
from .metrics import s21_at_operating_point
from .transmon import qubit_freq_from_flux
from .yieldmc import relative_kappa, spread_curves, standard_normal_trials, yield_curve

CHI_KAPPA_MARKER = 0.038

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FIT = 3


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt(v):
    return f"{float(v):.9g}"


def format_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


def read_trace_csv(path):
    """Read ``freq_mhz,s21_re,s21_im[,qubit_state]``; returns (X, s21).

    ``X`` is the frequency column, or (frequency, state) pairs when a
    ``qubit_state`` column is present. Extra columns are ignored.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"freq_mhz", "s21_re", "s21_im"} - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        rows = list(reader)
    try:
        freq = np.array([float(r["freq_mhz"]) for r in rows])
        s21 = np.array([complex(float(r["s21_re"]), float(r["s21_im"])) for r in rows])
        if "qubit_state" in reader.fieldnames:
            state = np.array([float(r["qubit_state"]) for r in rows])
            return np.column_stack([freq, state]), s21
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: non-numeric value ({exc})") from exc
    return freq, s21


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fig1b(cfg, args):
    rows = spread_curves(cfg.grids.fig1b_db.values())
    _emit(format_csv(("gamma_out_db", "spread_eq1", "spread_eq2"), rows), args.out)


def cmd_fig2(cfg, args):
    out = Path(args.out or "fig2")
    out.mkdir(parents=True, exist_ok=True)
    yc, f2 = cfg.yield_cfg, cfg.fig2
    edges = np.linspace(0.0, 1.0, f2.histogram_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    # every position sees the same draws, as kappa_samples_at_position would give
    z = standard_normal_trials(yc.seed, yc.trials, 1, n_jobs=args.jobs)[:, 0]
    hist_rows = []
    for pos in f2.histogram_positions:
        counts, _ = np.histogram(relative_kappa(pos, 1.0 + yc.sigma_rel * z), bins=edges)
        hist_rows.extend((pos, c, n) for c, n in zip(centers, counts))
    (out / "fig2_histograms.csv").write_text(
        format_csv(("position", "kappa_over_kappa0", "count"), hist_rows), encoding="utf-8")

    curves = yield_curve(yc, f2.n_values, f2.tolerances, n_jobs=args.jobs)
    yield_rows = [(n, tol, p) for tol in f2.tolerances for n, p in zip(f2.n_values, curves[tol])]
    (out / "fig2_yield.csv").write_text(
        format_csv(("n_resonators", "tolerance", "probability"), yield_rows), encoding="utf-8")


def cmd_yield(cfg, args):
    yc = cfg.yield_cfg
    p = yield_curve(yc, [yc.n_resonators], n_jobs=args.jobs)[yc.tolerance_rel][0]
    rows = [(yc.n_resonators, yc.tolerance_rel, p)]
    _emit(format_csv(("n_resonators", "tolerance", "probability"), rows), args.out)


def cmd_s21(cfg, args):
    freq = cfg.grids.s21.values()
    include_loss = cfg.include_package_loss or args.include_package_loss
    states = args.state
    header = ["freq_mhz", "s21_re", "s21_im", "s21_db", "s21_phase_deg"]
    if len(states) > 1:
        header.append("qubit_state")
    rows = []
    for st in states:
        tr = s21_trace(cfg.model, st, freq, include_package_loss=include_loss)
        cols = [tr.freq, tr.s21.real, tr.s21.imag, tr.s21_db, tr.s21_phase_deg]
        if len(states) > 1:
            cols.append(np.full(len(tr), st))
        rows.extend(zip(*cols))
    _emit(format_csv(header, rows), args.out)


def cmd_fluxmap(cfg, args):
    freq = cfg.grids.fluxmap_freq.values()
    include_loss = cfg.include_package_loss or args.include_package_loss
    rows = []
    for flux in cfg.grids.fluxmap_flux.values():
        try:
            w01 = qubit_freq_from_flux(replace(cfg.squid, flux=float(flux)))
            model = replace(cfg.model, transmon=replace(cfg.model.transmon, omega_01=w01))
            db = s21_trace(model, 0, freq, include_package_loss=include_loss).s21_db
        except (LabelingAmbiguityError, NonConvergenceError, AllPassError):
            # hybridized qubit/resonator states have no even/odd label
            db = np.full(freq.size, math.nan)
        rows.extend(zip(np.full(freq.size, flux), freq, db))
    _emit(format_csv(("flux", "freq_mhz", "s21_db"), rows), args.out)


def cmd_chikappa(cfg, args):
    x = np.union1d(cfg.grids.chikappa.values(), [CHI_KAPPA_MARKER])
    rows = []
    for r in x:
        mag, _ = s21_at_operating_point(r, 1.0)
        rows.append((r, mag, mag * mag, 1.0 if r == CHI_KAPPA_MARKER else 0.0))
    _emit(format_csv(("chi_over_kappa", "s21_mag", "s21_mag_sq", "marker"), rows), args.out)


def cmd_fit(cfg, args):
    X, s21 = read_trace_csv(args.input)
    fs = cfg.fit
    fitter = AllPassFitter.from_model(
        cfg.model,
        qubit_state=args.state,
        phi_bounds=tuple(math.pi * b for b in fs.phi_bounds_over_pi),
        g_total_bounds=fs.g_total_bounds,
        init=fs.init,
        n_grid=fs.n_grid,
        max_evals=fs.max_evals,
        n_jobs=args.jobs,
    )
    fitter.fit(X, s21)
    text = json.dumps(fitter.result_.to_json_dict(), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)


COMMANDS = {
    "fig1b": cmd_fig1b,
    "fig2": cmd_fig2,
    "s21": cmd_s21,
    "fluxmap": cmd_fluxmap,
    "chikappa": cmd_chikappa,
    "fit": cmd_fit,
    "yield": cmd_yield,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


_GLOBAL_DEFAULTS = {"config": None, "seed": None, "out": None, "jobs": 1, "validate": False}


def _global_options(parser, suppress):
    # subparsers repeat the options with SUPPRESS so either position works
    def d(name):
        return argparse.SUPPRESS if suppress else _GLOBAL_DEFAULTS[name]

    parser.add_argument("--config", metavar="PATH", default=d("config"),
                        help="JSON run configuration")
    parser.add_argument("--seed", type=int, metavar="N", default=d("seed"),
                        help="override yield.seed")
    parser.add_argument("--out", metavar="PATH", default=d("out"),
                        help="output file (directory for fig2)")
    parser.add_argument("--jobs", type=int, metavar="N", default=d("jobs"),
                        help="worker threads; results do not depend on it")
    parser.add_argument("--validate", action="store_true", default=d("validate"),
                        help="check the configuration and exit")


def build_parser():
    parser = argparse.ArgumentParser(prog="allpass", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    loss = argparse.ArgumentParser(add_help=False)
    loss.add_argument("--include-package-loss", action="store_true",
                      help="apply the package insertion loss")

    sub.add_parser("fig1b", parents=[common], help="linewidth spread vs output mismatch")
    sub.add_parser("fig2", parents=[common], help="linewidth histograms and yield curves")
    sub.add_parser("yield", parents=[common], help="single yield probability")
    p = sub.add_parser("s21", parents=[common, loss], help="transmission trace")
    p.add_argument("--state", type=int, nargs="+", default=[0],
                   help="qubit state(s); several add a qubit_state column")
    sub.add_parser("fluxmap", parents=[common, loss], help="|S21| versus flux and frequency")
    sub.add_parser("chikappa", parents=[common], help="|S21| at the readout tone vs chi/kappa")
    p = sub.add_parser("fit", parents=[common], help="fit phi and g_total to a trace CSV")
    p.add_argument("input", help="CSV with freq_mhz,s21_re,s21_im[,qubit_state]")
    p.add_argument("--state", type=int, default=0,
                   help="qubit state when the CSV has no qubit_state column")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
    except (OSError, AllPassError, ValueError) as exc:
        print(f"allpass: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.validate:
        print("config OK")
        return EXIT_OK
    if args.command is None:
        parser.error("a command is required")
    try:
        COMMANDS[args.command](cfg, args)
    except FitError as exc:
        print(f"allpass: fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (OSError, AllPassError, ValueError) as exc:
        print(f"allpass: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
