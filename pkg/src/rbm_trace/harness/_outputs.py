import os
from typing import Dict

from rbm_trace.common.exc import RbmTraceError
from rbm_trace.common.serialization import PathLike, write_csv, write_json

from ._runner import ExperimentReport

LOGLOG_COLUMNS = ["path", "setting", "scale", "count", "in_window"]
SUMMARY_COLUMNS = [
    "path",
    "setting",
    "seed",
    "value",
    "stderr",
    "r2",
    "window_scale_max",
    "window_scale_min",
    "empty",
    "window_fallback",
    "n_steps",
    "reflection_fallbacks",
    "error",
]
FIT_COLUMNS = ["path", "setting", "log_inv_scale", "log_count_fit"]


def emit_outputs(report: ExperimentReport, out_dir: PathLike) -> Dict[str, str]:
    """Write ``report.json``, ``loglog.csv``, ``summary.csv`` and ``fit.csv`` into ``out_dir``.

    The CSVs hold everything an external plotter needs; a report without paths gives header-only CSVs.

    Returns:
        Dict[str, str]: File kind to written path.

    Raises:
        RbmTraceError: The directory or a file cannot be written.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise RbmTraceError(f"Cannot create output directory {os.path.abspath(out_dir)}: {e}") from e

    loglog, summary, fit = [], [], []
    for row in report.paths:
        est = row.estimate
        window = est.window if est is not None else []
        summary.append(
            [
                row.index,
                row.setting,
                str(row.seed),
                row.value,
                est.stderr if est is not None else None,
                est.r2 if est is not None else None,
                est.scales[window[0]] if window else None,
                est.scales[window[-1]] if window else None,
                int(row.empty),
                int(row.window_fallback),
                row.n_steps,
                row.reflection_fallbacks,
                row.error or "",
            ]
        )
        if est is None:
            continue
        in_window = set(window)
        for i, (scale, count) in enumerate(zip(est.scales, est.counts)):
            loglog.append([row.index, row.setting, scale, count, int(i in in_window)])
        for x, y in est.fitted_line:
            fit.append([row.index, row.setting, x, y])

    return {
        "report": write_json(os.path.join(out_dir, "report.json"), report.model_dump()),
        "loglog": write_csv(os.path.join(out_dir, "loglog.csv"), LOGLOG_COLUMNS, loglog),
        "summary": write_csv(os.path.join(out_dir, "summary.csv"), SUMMARY_COLUMNS, summary),
        "fit": write_csv(os.path.join(out_dir, "fit.csv"), FIT_COLUMNS, fit),
    }
