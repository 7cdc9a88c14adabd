"""The ``rbm-trace`` command line: ``run`` an experiment preset, ``list`` the presets, ``calibrate`` the estimator."""

import argparse
import sys
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.table import Table

from rbm_trace.common.exc import RbmTraceError
from rbm_trace.common.utils import set_quiet
from rbm_trace.fracdim import calibration_gate

from ._config import load_runtime_settings, read_config_file, resolve_config
from ._outputs import emit_outputs
from ._presets import PRESETS, preset_catalog
from ._runner import ExperimentReport, report_fingerprint, run_experiment

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

OVERRIDE_FLAGS = (
    "preset",
    "paths",
    "T",
    "dt",
    "s",
    "master_seed",
    "out_dir",
    "workers",
    "k_min",
    "k_max",
    "auto_window",
)


def _fmt(v: Optional[float], digits: int = 4) -> str:
    return "-" if v is None else f"{v:.{digits}f}"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rbm-trace", description="Monte Carlo dimension estimates for reflecting Brownian motion."
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment preset and write its report and plot data.")
    run.add_argument("--preset", choices=sorted(PRESETS), default=None, help="Experiment preset.")
    run.add_argument("--config", default=None, help="JSON (or YAML) experiment config; flags override its values.")
    run.add_argument("--paths", type=int, default=None, help="Number of independent paths M.")
    run.add_argument("--T", dest="T", type=float, default=None, help="Time horizon.")
    run.add_argument("--dt", type=float, default=None, help="Time step of the simulated path.")
    run.add_argument("--s", type=float, default=None, help="Subordinator index in (0, 1).")
    run.add_argument("--seed", dest="master_seed", type=int, default=None, help="Master seed.")
    run.add_argument("--out", dest="out_dir", default=None, help="Output directory.")
    run.add_argument("--workers", type=int, default=None, help="Worker threads (default: RBM_TRACE_WORKERS).")
    run.add_argument("--k-min", dest="k_min", type=int, default=None, help="Coarsest dyadic level.")
    run.add_argument("--k-max", dest="k_max", type=int, default=None, help="Finest dyadic level.")
    run.add_argument(
        "--no-auto-window", dest="auto_window", action="store_false", default=None, help="Fit all scales."
    )
    run.add_argument("--env-file", default=None, help="Dotenv file with RBM_TRACE_* defaults.")
    run.add_argument("--quiet", action="store_true", help="Silence progress logs.")

    sub.add_parser("list", help="Print the preset catalog with predictions and the statements they test.")
    sub.add_parser("calibrate", help="Run the box-counting calibration fixtures.")
    return ap


def _print_report(console: Console, report: ExperimentReport, files: Dict[str, str]) -> None:
    table = Table(title=f"{report.preset} ({report.quantity})")
    for col in ("paths", "failures", "mean", "std", "stderr", "lag-1 rho", "predicted", "tolerance", "passed"):
        table.add_column(col)
    agg = report.aggregate
    assert agg is not None
    passed = "exploratory" if report.passed is None else ("PASS" if report.passed else "FAIL")
    table.add_row(
        str(agg.n),
        str(report.failures),
        _fmt(agg.mean),
        _fmt(agg.std),
        _fmt(agg.stderr),
        _fmt(agg.lag1_autocorrelation, 3),
        _fmt(report.predicted),
        f"-{report.tolerance_below:.2f}/+{report.tolerance_above:.2f}",
        passed,
    )
    console.print(table)
    if agg.seed_independent is False:
        console.print(f"[yellow]Seed check failed: |lag-1 rho| = {abs(agg.lag1_autocorrelation or 0.0):.3f} >= 0.3[/]")
    if report.sweep:
        sweep = Table(title="Width sweep")
        sweep.add_column("width exponent")
        sweep.add_column("mean")
        sweep.add_column("stderr")
        for point in report.sweep:
            sweep.add_row(f"{point.width_exponent:g}", _fmt(point.aggregate.mean), _fmt(point.aggregate.stderr))
        console.print(sweep)
        console.print(f"Non-increasing trend: {report.trend_non_increasing}")
    console.print(f"Citation: {report.citation}")
    console.print(f"Fingerprint: {report_fingerprint(report)}")
    for kind, path in files.items():
        console.print(f"{kind}: {path}")


def cmd_run(args: argparse.Namespace, console: Console) -> int:
    settings = load_runtime_settings(args.env_file)
    set_quiet(args.quiet or settings.quiet)
    file_values = read_config_file(args.config) if args.config else {}
    overrides: Dict[str, Any] = {k: getattr(args, k) for k in OVERRIDE_FLAGS}
    cfg = resolve_config(file_values=file_values, overrides=overrides, settings=settings)
    report = run_experiment(cfg)
    files = emit_outputs(report, cfg.out_dir)
    _print_report(console, report, files)
    return EXIT_FAIL if report.passed is False else EXIT_PASS


def cmd_list(console: Console) -> int:
    table = Table(title="rbm-trace presets")
    for col in ("preset", "quantity", "predicted", "tolerance", "statement"):
        table.add_column(col)
    for entry in preset_catalog():
        if entry.comparison == "exploratory":
            tol = "exploratory"
        elif entry.comparison == "upper":
            tol = f"<= +{entry.tolerance_above:.2f}"
        else:
            tol = f"-{entry.tolerance_below:.2f}/+{entry.tolerance_above:.2f}"
        table.add_row(entry.name, entry.quantity, _fmt(entry.predicted), tol, entry.citation)
    console.print(table)
    return EXIT_PASS


def cmd_calibrate(console: Console) -> int:
    results = calibration_gate()
    table = Table(title="Box-counting calibration")
    for col in ("fixture", "analytic", "estimate", "error", "r2", "seconds", "passed"):
        table.add_column(col)
    for res in results:
        table.add_row(
            res.name,
            _fmt(res.analytic),
            _fmt(res.estimate.slope),
            f"{res.error:+.4f}",
            _fmt(res.estimate.r2),
            f"{res.seconds:.2f}",
            "PASS" if res.passed else "FAIL",
        )
    console.print(table)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console()
    try:
        if args.command == "run":
            return cmd_run(args, console)
        if args.command == "list":
            return cmd_list(console)
        return cmd_calibrate(console)
    except RbmTraceError as e:
        Console(stderr=True).print(f"Error: {e}", style="bold red", markup=False)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
