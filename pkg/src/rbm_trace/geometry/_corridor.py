"""Rooms-and-slits domain around a product of fat Cantor sets.

The unit square minus ``B = C x C`` (``C`` a fat Cantor set at a finite stage) is tiled by a quadtree of dyadic
squares ("rooms"). Every stage-``G`` endpoint of ``C`` is a dyadic rational with denominator ``2 ** (2 G + 1)``, so
a quadtree of that depth resolves ``B`` exactly. Adjacent rooms are separated by walls; a spanning tree of the room
adjacency graph decides where a wall gets a slit (a gap of width ``exp(-g ** w)``, ``g`` the room generation).
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from rbm_trace.common.exc import DomainError
from rbm_trace.common.utils import geo_log

MIN_GENERATIONS = 1
MAX_GENERATIONS = 6
CLOSED_SLIT_WIDTH = 1e-12


def fat_cantor_intervals(stage: int) -> np.ndarray:
    """Intervals of the Smith-Volterra-Cantor construction after ``stage`` removal steps.

    Step ``k`` removes an open middle interval of length ``4 ** -k`` from each of the ``2 ** (k - 1)`` intervals
    left by the previous step.

    Args:
        stage (int): Number of removal steps, ``>= 0``.

    Returns:
        np.ndarray: ``(2 ** stage, 2)`` array of closed intervals ``[a, b]``, sorted.
    """
    if stage < 0:
        raise DomainError(f"Fat Cantor stage must be >= 0, got {stage}.")
    intervals = np.array([[0.0, 1.0]])
    for k in range(1, stage + 1):
        half_gap = 0.5 * 4.0**-k
        mid = intervals.mean(axis=1)
        left = np.column_stack([intervals[:, 0], mid - half_gap])
        right = np.column_stack([mid + half_gap, intervals[:, 1]])
        intervals = np.stack([left, right], axis=1).reshape(-1, 2)
    return intervals


def fat_cantor_measure(stages: int) -> float:
    """Lebesgue measure of the stage-``stages`` approximation; tends to 1/2."""
    if stages < 0:
        raise DomainError(f"Fat Cantor stage must be >= 0, got {stages}.")
    return 0.5 + 2.0 ** (-stages - 1)


@dataclass(frozen=True)
class CorridorLayout:
    walls: np.ndarray  # (W, 4) segments
    rooms: np.ndarray  # (R, 3) integer x0, y0, size on the fine grid
    room_generation: np.ndarray  # (R,)
    slits: np.ndarray  # (S, 4) opening segments
    slit_widths: np.ndarray  # (S,)
    cantor: np.ndarray  # (2 ** G, 2) intervals of C
    resolution: int  # fine grid cells per unit length
    start_point: np.ndarray


def _classify_1d(lo: np.ndarray, hi: np.ndarray, c_lo: np.ndarray, c_hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """For ranges ``[lo, hi]`` return (inside one interval of C, interior disjoint from C)."""
    k = np.searchsorted(c_lo, lo, side="right") - 1
    inside = (k >= 0) & (hi <= c_hi[np.clip(k, 0, None)])
    k2 = np.searchsorted(c_lo, hi, side="left") - 1
    outside = (k2 < 0) | (c_hi[np.clip(k2, 0, None)] <= lo)
    return inside, outside


def _quadtree_rooms(generations: int, c_lo: np.ndarray, c_hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    max_depth = 2 * generations + 1
    n = 1 << max_depth
    squares = np.array([[0, 0, n]], dtype=np.int64)
    rooms = []
    depths = []
    for depth in range(max_depth + 1):
        x0, y0, size = squares[:, 0], squares[:, 1], squares[:, 2]
        x_in, x_out = _classify_1d(x0, x0 + size, c_lo, c_hi)
        y_in, y_out = _classify_1d(y0, y0 + size, c_lo, c_hi)
        white = x_out | y_out
        black = x_in & y_in & ~white
        mixed = ~(white | black)
        rooms.append(squares[white])
        depths.append(np.full(int(white.sum()), depth, dtype=np.int64))
        if not mixed.any():
            break
        if depth == max_depth:
            raise DomainError("Quadtree failed to resolve the Cantor product at the finest depth.")
        parent = squares[mixed]
        half = parent[:, 2] // 2
        children = []
        for dx in (0, 1):
            for dy in (0, 1):
                children.append(np.column_stack([parent[:, 0] + dx * half, parent[:, 1] + dy * half, half]))
        squares = np.concatenate(children)
    return np.concatenate(rooms), np.concatenate(depths)


def _match_sides(
    line_low: np.ndarray,
    lo_low: np.ndarray,
    hi_low: np.ndarray,
    line_high: np.ndarray,
    lo_high: np.ndarray,
    hi_high: np.ndarray,
    n: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split room sides lying on common grid lines into elementary pieces.

    ``*_low`` are sides of rooms below/left of their line, ``*_high`` of rooms above/right. Returns, per elementary
    piece, ``(line, a, b, room_low, room_high)`` with ``-1`` where no room lies on that side.
    """
    stride = float(n + 1)
    key_lo_low = line_low * stride + lo_low
    key_hi_low = line_low * stride + hi_low
    key_lo_high = line_high * stride + lo_high
    key_hi_high = line_high * stride + hi_high

    breaks = np.unique(np.concatenate([key_lo_low, key_hi_low, key_lo_high, key_hi_high]))
    line_of = np.floor(breaks / stride)
    same_line = line_of[:-1] == line_of[1:]
    a = breaks[:-1][same_line]
    b = breaks[1:][same_line]
    mid = 0.5 * (a + b)
    line = line_of[:-1][same_line]

    def cover(keys_lo: np.ndarray, keys_hi: np.ndarray) -> np.ndarray:
        order = np.argsort(keys_lo, kind="stable")
        sorted_lo = keys_lo[order]
        idx = np.searchsorted(sorted_lo, mid, side="right") - 1
        ok = idx >= 0
        idx_c = np.clip(idx, 0, None)
        ok &= keys_hi[order][idx_c] > mid
        return np.where(ok, order[idx_c], -1)

    room_low = cover(key_lo_low, key_hi_low)
    room_high = cover(key_lo_high, key_hi_high)
    return line, a - line * stride, b - line * stride, room_low, room_high


def build_corridor_layout(generations: int, width_exponent: float) -> CorridorLayout:
    """Compute the rooms, walls and slits of the corridor domain.

    Raises:
        DomainError: On parameters out of range, or when the slits that are wide enough to stay open do not
            connect every room.
    """
    if not (MIN_GENERATIONS <= generations <= MAX_GENERATIONS):
        raise DomainError(f"generations must be in [{MIN_GENERATIONS}, {MAX_GENERATIONS}], got {generations}.")
    if not (math.isfinite(width_exponent) and width_exponent >= 1.0):
        raise DomainError(f"width_exponent must be >= 1, got {width_exponent}.")

    n = 1 << (2 * generations + 1)
    cantor = fat_cantor_intervals(generations)
    c_int = np.rint(cantor * n).astype(np.int64)
    c_lo, c_hi = c_int[:, 0], c_int[:, 1]

    rooms, depths = _quadtree_rooms(generations, c_lo, c_hi)
    generation = np.clip((depths + 1) // 2, 1, generations)
    n_rooms = rooms.shape[0]
    geo_log(f"Corridor domain G={generations}, w={width_exponent}: {n_rooms} rooms.")

    x0, y0, size = rooms[:, 0], rooms[:, 1], rooms[:, 2]
    # Vertical lines: the room is on the low side along its right edge, on the high side along its left edge.
    v_line, v_a, v_b, v_low, v_high = _match_sides(x0 + size, y0, y0 + size, x0, y0, y0 + size, n)
    h_line, h_a, h_b, h_low, h_high = _match_sides(y0 + size, x0, x0 + size, y0, x0, x0 + size, n)

    # Segments as (x1, y1, x2, y2) on the fine grid.
    v_seg = np.column_stack([v_line, v_a, v_line, v_b])
    h_seg = np.column_stack([h_a, h_line, h_b, h_line])
    seg = np.concatenate([v_seg, h_seg])
    low = np.concatenate([v_low, h_low])
    high = np.concatenate([v_high, h_high])

    one_sided = (low >= 0) ^ (high >= 0)
    shared = (low >= 0) & (high >= 0)
    shared_seg = seg[shared]
    u = low[shared]
    v = high[shared]

    shared_len = np.hypot(shared_seg[:, 2] - shared_seg[:, 0], shared_seg[:, 3] - shared_seg[:, 1]) / n
    slit_gen = np.maximum(generation[u], generation[v]).astype(np.float64)
    widths = np.minimum(np.exp(-(slit_gen**width_exponent)), shared_len / 2.0)
    openable = widths >= CLOSED_SLIT_WIDTH

    graph = sparse.coo_matrix(
        (np.ones(int(openable.sum())), (u[openable], v[openable])), shape=(n_rooms, n_rooms)
    ).tocsr()
    n_components, _ = csgraph.connected_components(graph, directed=False)
    if n_components != 1:
        raise DomainError(
            f"Corridor domain with generations={generations}, width_exponent={width_exponent} is disconnected: "
            f"{n_components} components once slits narrower than {CLOSED_SLIT_WIDTH} are closed."
        )

    # Start in the largest room closest to the centre of the square.
    centres = (rooms[:, :2] + rooms[:, 2:3] / 2.0) / n
    off_centre = np.hypot(centres[:, 0] - 0.5, centres[:, 1] - 0.5)
    root = int(np.lexsort((centres[:, 0], centres[:, 1], off_centre, -size))[0])

    _, predecessors = csgraph.breadth_first_order(graph, root, directed=False, return_predecessors=True)
    child = np.flatnonzero(predecessors >= 0)
    tree_pairs = np.sort(np.column_stack([predecessors[child], child]), axis=1)
    pair_keys = np.minimum(u, v) * n_rooms + np.maximum(u, v)
    tree_keys = tree_pairs[:, 0] * n_rooms + tree_pairs[:, 1]
    in_tree = np.isin(pair_keys, tree_keys) & openable

    real = shared_seg.astype(np.float64) / n
    solid = real[~in_tree]
    slit_seg = real[in_tree]
    slit_w = widths[in_tree]
    direction = (slit_seg[:, 2:] - slit_seg[:, :2]) / (shared_len[in_tree][:, None])
    middle = 0.5 * (slit_seg[:, :2] + slit_seg[:, 2:])
    gap_lo = middle - 0.5 * slit_w[:, None] * direction
    gap_hi = middle + 0.5 * slit_w[:, None] * direction
    split_a = np.column_stack([slit_seg[:, :2], gap_lo])
    split_b = np.column_stack([gap_hi, slit_seg[:, 2:]])

    walls = np.concatenate([seg[one_sided].astype(np.float64) / n, solid, split_a, split_b])
    walls = walls[np.hypot(walls[:, 2] - walls[:, 0], walls[:, 3] - walls[:, 1]) > 0.0]
    geo_log(f"Corridor domain: {walls.shape[0]} wall segments, {slit_seg.shape[0]} open slits.")

    return CorridorLayout(
        walls=np.ascontiguousarray(walls),
        rooms=rooms,
        room_generation=generation,
        slits=np.column_stack([gap_lo, gap_hi]),
        slit_widths=slit_w,
        cantor=cantor,
        resolution=n,
        start_point=centres[root],
    )


def in_cantor_product(points: np.ndarray, cantor: np.ndarray) -> np.ndarray:
    """Whether each planar point lies in the closed set ``C x C``."""
    pts = np.atleast_2d(points)
    result = np.ones(pts.shape[0], dtype=bool)
    for axis in range(2):
        k = np.searchsorted(cantor[:, 0], pts[:, axis], side="right") - 1
        result &= (k >= 0) & (pts[:, axis] <= cantor[np.clip(k, 0, None), 1])
    return result
