from typing import Optional

import numpy as np

from rbm_trace.common.serialization import PathLike, write_csv
from rbm_trace.geometry import DomainSpec, boundary_distances

from ._types import PathSample, TimeSet

AXES = ("x", "y", "z")


def path_to_csv(path: PathSample, file: PathLike, domain: Optional[DomainSpec] = None) -> str:
    """Write ``step, x, y[, z], dist_to_boundary``; the distance column is empty for paths without a domain."""
    n = path.ambient_dim
    columns = ["step", *AXES[:n], "dist_to_boundary"]
    dom = domain if domain is not None else path.domain
    if dom is not None:
        dist, _ = boundary_distances(dom, path.positions)
    else:
        dist = np.full(path.positions.shape[0], np.nan)
    data = {"step": np.arange(path.positions.shape[0], dtype=np.int64), "dist_to_boundary": dist}
    for axis in range(n):
        data[AXES[axis]] = path.positions[:, axis]
    return write_csv(file, columns, data)


def timeset_to_csv(ts: TimeSet, file: PathLike) -> str:
    """Write the run-length encoding of ``ts`` as ``start, end`` rows."""
    return write_csv(file, ["start", "end"], ts.to_intervals())
