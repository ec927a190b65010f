#!/usr/bin/env python3
"""
Sweeps, switch-off and ZZ-zero searches, figure datasets and the validation
suite for the two-qubit / two-resonator coupler model.

Usage:
  python3 scripts/run_coupler_analysis.py spectrum --config configs/fig2.conf --sweep phi_y 0 1.2 --out data/levels.csv
  python3 scripts/run_coupler_analysis.py coupling --sweep omega_y 4.2 5.0 --grid 801
  python3 scripts/run_coupler_analysis.py zz --sweep omega_y 4.7 5.0 --cross-kerr --numeric-zz
  python3 scripts/run_coupler_analysis.py switchoff --which g_cr --sweep phi_x -1.5 1.5 --sweep2 phi_y -1.5 1.5
  python3 scripts/run_coupler_analysis.py zzzero --sweep omega_y 4.05 5.0
  python3 scripts/run_coupler_analysis.py figure fig6 --out data/figures
  python3 scripts/run_coupler_analysis.py validate

Without --config the reference device parameters (configs/fig2.conf) are
used. Without --out the dataset is printed to stdout as CSV.

Exit codes:
  0 - success
  1 - configuration error
  2 - numeric failure (pole, singular matrix, domain error) or a failed validation check
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Iterable

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from analysis import (EvaluationOptions, SweepAxis, SweepSpec, find_switchoff, find_zz_zero,  # noqa: E402
                      run_level_sweep, run_sweep)
from circuit_model import FIG2_PARAMS  # noqa: E402
from config_utils import RunConfig, load_config  # noqa: E402
from dataset_io import FLOAT_FORMAT, append_log_line, full_path, write_dataset  # noqa: E402
from errors import ConfigError, DomainError, NumericError, PoleError  # noqa: E402
from figures import RECIPES, figure_recipes  # noqa: E402
from hamiltonian import DEFAULT_TRUNCATION, HamiltonianOptions, TruncationScheme, build_hamiltonian, dump_matrix_csv  # noqa: E402
from options import (CONVENTIONS, resolve_coupling_convention, resolve_grid_points,  # noqa: E402
                     resolve_workers, resolve_zz_form)
from validation import CHECKS, run_checks  # noqa: E402
from zz_analytic import ZZ_FORMS  # noqa: E402

DEFAULT_LOG_FILE = full_path("data", "runs.log")


def _load(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return RunConfig(params=FIG2_PARAMS, source="<fig2 defaults>")


def _truncation(args, config: RunConfig) -> TruncationScheme:
    if args.truncation:
        try:
            return TruncationScheme.parse(args.truncation)
        except DomainError as e:
            raise ConfigError(f"--truncation: {e}") from None
    return config.truncation or DEFAULT_TRUNCATION


def _evaluation(args, config: RunConfig) -> EvaluationOptions:
    convention = resolve_coupling_convention(args.convention, config.coupling_convention)
    return EvaluationOptions(
        include_cross_kerr=bool(getattr(args, "cross_kerr", False)),
        zz_form=resolve_zz_form(args.zz_form, config.zz_form),
        trunc=_truncation(args, config),
        hamiltonian=HamiltonianOptions(coupling_convention=convention),
        workers=resolve_workers(getattr(args, "workers", None)),
    )


def _axis(values, points: int) -> SweepAxis:
    variable, start, stop = values
    try:
        return SweepAxis(variable, float(start), float(stop), points)
    except ValueError as e:
        raise ConfigError(f"--sweep {variable} {start} {stop}: {e}") from None


def _sweep(args, config: RunConfig) -> SweepSpec:
    """The requested grid; a single point at the configured bias when no --sweep is given."""
    if not args.sweep:
        if args.sweep2:
            raise ConfigError("--sweep2 needs --sweep")
        return SweepSpec.line("phi_y", config.bias.phi_y, config.bias.phi_y, 1)
    two_d = bool(args.sweep2)
    points = resolve_grid_points(args.grid, config.grid_points, two_d=two_d)
    try:
        return SweepSpec(_axis(args.sweep, points), _axis(args.sweep2, points) if two_d else None)
    except DomainError as e:
        raise ConfigError(str(e)) from None


def _metadata(args, config: RunConfig, options: EvaluationOptions, spec: SweepSpec | None = None) -> dict:
    meta = {
        "command": args.cmd,
        "config": config.source,
        "params": config.params.as_dict(),
        "bias": {"phi_x": config.bias.phi_x, "phi_y": config.bias.phi_y},
        "options": {
            "truncation": str(options.trunc),
            "coupling_convention": options.hamiltonian.coupling_convention,
            "zz_form": options.zz_form,
            "include_cross_kerr": options.include_cross_kerr,
        },
    }
    if spec is not None:
        meta["sweep"] = [{"variable": a.variable, "start": a.start, "stop": a.stop, "points": a.points}
                         for a in spec.axes]
    return meta


def _emit(args, frame, metadata: dict):
    if args.out:
        write_dataset(args.out, frame, metadata)
        print(f"wrote {len(frame)} rows to {args.out}")
    else:
        frame.to_csv(sys.stdout, float_format=FLOAT_FORMAT, lineterminator="\n", index=False)


def cmd_spectrum(args) -> int:
    config = _load(args)
    options = _evaluation(args, config)
    spec = _sweep(args, config)
    if args.dump_matrix:
        H = build_hamiltonian(config.params, options.trunc, options.hamiltonian, config.bias)
        dump_matrix_csv(H, args.dump_matrix)
    labels = args.labels.split(",") if args.labels else None
    frame = run_level_sweep(config, spec, labels, tracked=args.tracked, trunc=options.trunc,
                            options=options.hamiltonian)
    _emit(args, frame, _metadata(args, config, options, spec))
    return 0


def cmd_coupling(args) -> int:
    config = _load(args)
    options = _evaluation(args, config)
    spec = _sweep(args, config)
    frame = run_sweep(config, spec, {"g_d", "g_cr", "g_in", "delta_omega", "decoupled"}, options)
    _emit(args, frame, _metadata(args, config, options, spec))
    return 0


def cmd_zz(args) -> int:
    config = _load(args)
    options = _evaluation(args, config)
    spec = _sweep(args, config)
    quantities = {"zz", "zz_numeric"} if args.numeric_zz else {"zz"}
    frame = run_sweep(config, spec, quantities, options)
    _emit(args, frame, _metadata(args, config, options, spec))
    return 0


def _report(args, config: RunConfig, options: EvaluationOptions, spec: SweepSpec, report) -> int:
    for line in report.diagnostics:
        print(f"note: {line}", file=sys.stderr)
    if report.degenerate:
        print("note: function is identically zero; no roots reported", file=sys.stderr)
    meta = _metadata(args, config, options, spec)
    meta.update({"method": report.method, "degenerate": report.degenerate, "diagnostics": report.diagnostics})
    _emit(args, report.frame(), meta)
    return 0


def cmd_switchoff(args) -> int:
    config = _load(args)
    options = _evaluation(args, config)
    spec = _sweep(args, config)
    report = find_switchoff(config.params, spec, args.which, config.bias)
    return _report(args, config, options, spec, report)


def cmd_zzzero(args) -> int:
    config = _load(args)
    options = _evaluation(args, config)
    spec = _sweep(args, config)
    report = find_zz_zero(config.params, spec, options.include_cross_kerr, options.zz_form, config.bias)
    return _report(args, config, options, spec, report)


def cmd_figure(args) -> int:
    config = RunConfig(params=FIG2_PARAMS, source="<figure recipe>")
    options = _evaluation(args, config)
    datasets = figure_recipes(args.name, args.grid, options)
    out_dir = args.out or full_path("data", "figures")
    for name, frame in datasets.items():
        path = os.path.join(out_dir, f"{name}.csv")
        write_dataset(path, frame, {**_metadata(args, config, options), "figure": args.name, "dataset": name})
        print(f"wrote {len(frame)} rows to {path}")
    return 0


def cmd_validate(args) -> int:
    results = run_checks(args.checks or None)
    failed = 0
    for result in results:
        mark = "✓" if result.passed else "✗"
        stream = sys.stdout if result.passed else sys.stderr
        print(f"{mark} {result.name} ({result.seconds:.1f}s): {result.detail}", file=stream)
        failed += not result.passed
    if failed:
        print(f"\n{failed} of {len(results)} checks failed.", file=sys.stderr)
        return 2
    return 0


def _common(p: argparse.ArgumentParser, sweep: bool = True):
    p.add_argument("--config", help="parameter file (key = value); defaults to the reference device")
    p.add_argument("--out", help="output CSV path (directory for 'figure'); stdout when omitted")
    p.add_argument("--grid", type=int, help="points per sweep axis")
    p.add_argument("--truncation", help="levels per device as a,x,y,b (default 4,3,3,4)")
    p.add_argument("--convention", choices=CONVENTIONS, help="qubit ladder-operator convention")
    p.add_argument("--zz-form", choices=ZZ_FORMS, help="closed-form ZZ ladder")
    p.add_argument("--workers", type=int, help="processes evaluating sweep points")
    p.add_argument("--cross-kerr", action="store_true", help="include the cross-resonator ZZ corrections")
    if sweep:
        p.add_argument("--sweep", nargs=3, metavar=("VAR", "START", "STOP"),
                       help="sweep phi_x, phi_y, omega_x or omega_y")
        p.add_argument("--sweep2", nargs=3, metavar=("VAR", "START", "STOP"), help="second axis for a 2D grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Two-qubit / two-resonator coupler analysis")
    parser.add_argument("--log-file", default=DEFAULT_LOG_FILE, help="append-only run log")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="cmd")

    p = sub.add_parser("spectrum", help="Labeled energy levels")
    _common(p)
    p.add_argument("--labels", help="comma-separated bare labels, e.g. 0100,0010")
    p.add_argument("--tracked", action="store_true", help="follow adiabatic branches instead of labels")
    p.add_argument("--dump-matrix", metavar="PATH", help="also write the Hamiltonian entries at the configured bias")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("coupling", help="Decoupled frequencies and effective couplings")
    _common(p)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("zz", help="Analytic ZZ breakdown")
    _common(p)
    p.add_argument("--numeric-zz", action="store_true", help="add the diagonalization ZZ column")
    p.set_defaults(func=cmd_zz)

    p = sub.add_parser("switchoff", help="Zeros of the effective qubit-qubit coupling")
    _common(p)
    p.add_argument("--which", choices=("g_d", "g_cr"), default="g_cr")
    p.set_defaults(func=cmd_switchoff)

    p = sub.add_parser("zzzero", help="Zeros of the analytic static ZZ")
    _common(p)
    p.set_defaults(func=cmd_zzzero)

    p = sub.add_parser("figure", help="Datasets behind a figure")
    p.add_argument("name", choices=sorted(RECIPES))
    _common(p, sweep=False)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="Run the acceptance checks")
    p.add_argument("checks", nargs="*", help=f"subset of checks (default all): {', '.join(CHECKS)}")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Iterable[str] | None = None) -> int:
    argv = list(argv) if argv is not None else sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not getattr(args, "func", None):
        parser.print_help()
        return 1

    invocation = " ".join(argv)
    try:
        code = args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        append_log_line(args.log_file, f"{invocation} -> config error: {e}")
        return 1
    except (PoleError, NumericError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        append_log_line(args.log_file, f"{invocation} -> numeric failure: {e}")
        return 2
    append_log_line(args.log_file, f"{invocation} -> exit {code}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
