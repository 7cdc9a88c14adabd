from rbm_trace.common.serialization import PathLike, write_csv, write_json

from ._estimate import DimensionEstimate


def estimate_to_csv(est: DimensionEstimate, file: PathLike) -> str:
    """Write ``scale, count, in_window`` rows, coarse to fine."""
    in_window = set(est.window)
    rows = [(s, c, int(i in in_window)) for i, (s, c) in enumerate(zip(est.scales, est.counts))]
    return write_csv(file, ["scale", "count", "in_window"], rows)


def estimate_summary_json(est: DimensionEstimate, file: PathLike) -> str:
    summary = {
        "slope": est.slope,
        "stderr": est.stderr,
        "r2": est.r2,
        "intercept": est.intercept,
        "window": est.window,
        "window_scales": [est.scales[i] for i in est.window],
        "auto_window": est.auto_window,
        "proxy": est.proxy,
    }
    return write_json(file, summary)
