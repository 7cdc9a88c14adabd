from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from rbm_trace.common.exc import DomainError

MAX_CELLS_PER_AXIS = 2048


@dataclass(frozen=True, eq=False)
class EdgeIndex:
    """Uniform-grid bucket index over a set of planar segments (CSR layout).

    The grid is the segments' bounding box padded by one cell on every side. Cell ``c = j * nx + i`` covers
    ``[gx0 + i * cell, gx0 + (i + 1) * cell) x [gy0 + j * cell, gy0 + (j + 1) * cell)``.
    """

    edges: np.ndarray
    starts: np.ndarray
    items: np.ndarray
    edt: np.ndarray
    gx0: float
    gy0: float
    cell: float
    nx: int
    ny: int

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def occupancy(self) -> float:
        """Fraction of grid cells that hold at least one segment."""
        return float(np.count_nonzero(np.diff(self.starts))) / self.n_cells

    @property
    def kernel_args(self):
        return (self.edges, self.starts, self.items)

    @property
    def grid_args(self):
        return (self.gx0, self.gy0, self.cell, self.nx, self.ny)


def build_edge_index(edges: np.ndarray, cell: Optional[float] = None) -> EdgeIndex:
    """Bucket ``edges`` (rows ``ax, ay, bx, by``) into a uniform grid.

    Args:
        edges (np.ndarray): ``(E, 4)`` segment array.
        cell (Optional[float]): Cell side. Defaults to twice the median segment length. Either way the side is
            raised so that neither axis has more than ``MAX_CELLS_PER_AXIS`` cells.

    Returns:
        EdgeIndex: The index.
    """
    edges = np.ascontiguousarray(edges, dtype=np.float64)
    if edges.ndim != 2 or edges.shape[1] != 4 or edges.shape[0] == 0:
        raise DomainError(f"Expected a non-empty (E, 4) segment array, got shape {edges.shape}.")
    if not np.all(np.isfinite(edges)):
        raise DomainError("Segment coordinates must be finite.")

    xs = np.concatenate([edges[:, 0], edges[:, 2]])
    ys = np.concatenate([edges[:, 1], edges[:, 3]])
    xmin, xmax, ymin, ymax = xs.min(), xs.max(), ys.min(), ys.max()
    span = max(xmax - xmin, ymax - ymin)
    if span <= 0.0:
        raise DomainError("Segments are degenerate (zero extent).")

    if cell is None:
        lengths = np.hypot(edges[:, 2] - edges[:, 0], edges[:, 3] - edges[:, 1])
        cell = 2.0 * float(np.median(lengths))
    cell = max(float(cell), span / (MAX_CELLS_PER_AXIS - 4))

    gx0 = float(xmin - cell)
    gy0 = float(ymin - cell)
    nx = int(np.floor((xmax - gx0) / cell)) + 2
    ny = int(np.floor((ymax - gy0) / cell)) + 2

    i0 = np.floor((np.minimum(edges[:, 0], edges[:, 2]) - gx0) / cell).astype(np.int64)
    i1 = np.floor((np.maximum(edges[:, 0], edges[:, 2]) - gx0) / cell).astype(np.int64)
    j0 = np.floor((np.minimum(edges[:, 1], edges[:, 3]) - gy0) / cell).astype(np.int64)
    j1 = np.floor((np.maximum(edges[:, 1], edges[:, 3]) - gy0) / cell).astype(np.int64)
    di = i1 - i0 + 1
    counts = di * (j1 - j0 + 1)

    # One (edge, cell) pair per cell touched by the edge's bounding box.
    edge_ids = np.repeat(np.arange(edges.shape[0], dtype=np.int64), counts)
    offsets = np.arange(edge_ids.size, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    ii = i0[edge_ids] + offsets % di[edge_ids]
    jj = j0[edge_ids] + offsets // di[edge_ids]
    cell_ids = jj * nx + ii

    order = np.argsort(cell_ids, kind="stable")
    items = np.ascontiguousarray(edge_ids[order])
    starts = np.zeros(nx * ny + 1, dtype=np.int64)
    np.cumsum(np.bincount(cell_ids, minlength=nx * ny), out=starts[1:])

    occupied = (np.diff(starts) > 0).reshape(ny, nx)
    edt = ndimage.distance_transform_edt(~occupied).astype(np.float64).ravel()

    return EdgeIndex(
        edges=edges,
        starts=starts,
        items=items,
        edt=np.ascontiguousarray(edt),
        gx0=gx0,
        gy0=gy0,
        cell=cell,
        nx=nx,
        ny=ny,
    )
