"""Scalar kernels over segment arrays and the grid-bucket edge index.

Segments are rows ``(ax, ay, bx, by)`` of a float64 array. The index is a CSR layout over a uniform grid: the edges
registered in cell ``c = j * nx + i`` are ``items[starts[c]:starts[c + 1]]``, and an edge is registered in every cell
its bounding box touches. ``edt[c]`` is the distance, in cell units and between cell centres, from cell ``c`` to the
nearest occupied cell.

Everything here runs under numba's nopython mode when numba is installed, so only scalars, ``math`` and array
indexing are used.
"""

import math

import numpy as np

from rbm_trace.common import njit

MAX_REFLECTIONS = 16
PARAM_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


@njit
def fold_interval(b: float, a0: float, a1: float) -> float:
    width = a1 - a0
    w2 = 2.0 * width
    d = b - a0
    y = d - w2 * math.floor(d / w2)
    if y > width:
        y = w2 - y
    return a0 + y


@njit
def segment_closest(px: float, py: float, ax: float, ay: float, bx: float, by: float):
    ex = bx - ax
    ey = by - ay
    l2 = ex * ex + ey * ey
    t = 0.0
    if l2 > 0.0:
        t = ((px - ax) * ex + (py - ay) * ey) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = ax + t * ex
    qy = ay + t * ey
    dx = px - qx
    dy = py - qy
    return dx * dx + dy * dy, qx, qy


@njit
def cell_of(px: float, py: float, gx0: float, gy0: float, cell: float, nx: int, ny: int):
    i = int(math.floor((px - gx0) / cell))
    j = int(math.floor((py - gy0) / cell))
    if i < 0:
        i = 0
    elif i > nx - 1:
        i = nx - 1
    if j < 0:
        j = 0
    elif j > ny - 1:
        j = ny - 1
    return i, j


@njit
def in_grid(px: float, py: float, gx0: float, gy0: float, cell: float, nx: int, ny: int) -> bool:
    return gx0 <= px <= gx0 + nx * cell and gy0 <= py <= gy0 + ny * cell


@njit
def nearest_edge_brute(px: float, py: float, edges: np.ndarray):
    best = math.inf
    bqx = px
    bqy = py
    be = -1
    for e in range(edges.shape[0]):
        d2, qx, qy = segment_closest(px, py, edges[e, 0], edges[e, 1], edges[e, 2], edges[e, 3])
        if d2 < best:
            best = d2
            bqx = qx
            bqy = qy
            be = e
    return math.sqrt(best), bqx, bqy, be


@njit
def nearest_edge(
    px: float,
    py: float,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    edt: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
):
    """Exact distance from ``(px, py)`` to the segment set, with the nearest point and edge id.

    Rings of cells around the query cell are scanned outwards; after ring ``r`` every unvisited cell is at least
    ``r * cell`` away, which is the stopping rule. Rings closer than the occupied-cell distance transform allows are
    skipped.
    """
    if not in_grid(px, py, gx0, gy0, cell, nx, ny):
        return nearest_edge_brute(px, py, edges)
    ci, cj = cell_of(px, py, gx0, gy0, cell, nx, ny)
    r0 = int(math.floor(edt[cj * nx + ci] / SQRT2))
    if r0 > 0:
        r0 -= 1
    best = math.inf
    bqx = px
    bqy = py
    be = -1
    rmax = nx if nx > ny else ny
    for r in range(r0, rmax + 1):
        for i in range(ci - r, ci + r + 1):
            if i < 0 or i >= nx:
                continue
            full_column = i == ci - r or i == ci + r
            j = cj - r
            while j <= cj + r:
                if 0 <= j < ny:
                    c = j * nx + i
                    for k in range(starts[c], starts[c + 1]):
                        e = items[k]
                        d2, qx, qy = segment_closest(px, py, edges[e, 0], edges[e, 1], edges[e, 2], edges[e, 3])
                        if d2 < best:
                            best = d2
                            bqx = qx
                            bqy = qy
                            be = e
                if full_column or r == 0:
                    j += 1
                else:
                    j += 2 * r
        if be >= 0 and math.sqrt(best) <= r * cell:
            break
    return math.sqrt(best), bqx, bqy, be


@njit
def distance_lower_bound(
    px: float, py: float, edt: np.ndarray, gx0: float, gy0: float, cell: float, nx: int, ny: int
) -> float:
    """Cheap lower bound on the distance to the segment set (0 when nothing better is known)."""
    if not in_grid(px, py, gx0, gy0, cell, nx, ny):
        return 0.0
    ci, cj = cell_of(px, py, gx0, gy0, cell, nx, ny)
    lb = (edt[cj * nx + ci] - SQRT2) * cell
    return lb if lb > 0.0 else 0.0


@njit
def first_crossing(
    ax: float,
    ay: float,
    bx: float,
    by: float,
    skip: int,
    two_sided: bool,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
):
    """Smallest parameter ``t`` in ``[0, 1]`` at which ``a + t (b - a)`` leaves through an edge.

    For one-sided (counterclockwise polygon) edges only outward crossings count, i.e. the direction has a positive
    component along the edge's right-hand normal. Two-sided edges (walls) count in both directions, excluding a
    touch at ``t ~ 0`` so a walk sitting on a wall can leave it.

    Returns:
        (t, edge): ``edge`` is -1 when nothing is crossed.
    """
    dx = bx - ax
    dy = by - ay
    i0, j0 = cell_of(min(ax, bx), min(ay, by), gx0, gy0, cell, nx, ny)
    i1, j1 = cell_of(max(ax, bx), max(ay, by), gx0, gy0, cell, nx, ny)
    t_low = PARAM_TOL if two_sided else -PARAM_TOL
    best_t = math.inf
    best_e = -1
    for j in range(j0, j1 + 1):
        for i in range(i0, i1 + 1):
            c = j * nx + i
            for k in range(starts[c], starts[c + 1]):
                e = items[k]
                if e == skip:
                    continue
                ex = edges[e, 2] - edges[e, 0]
                ey = edges[e, 3] - edges[e, 1]
                denom = dx * ey - dy * ex
                if two_sided:
                    if denom == 0.0:
                        continue
                elif denom <= 0.0:
                    continue
                wx = edges[e, 0] - ax
                wy = edges[e, 1] - ay
                t = (wx * ey - wy * ex) / denom
                if t < t_low or t > 1.0:
                    continue
                u = (wx * dy - wy * dx) / denom
                if u < -PARAM_TOL or u > 1.0 + PARAM_TOL:
                    continue
                if t < best_t:
                    best_t = t
                    best_e = e
    return best_t, best_e


@njit
def reflect_planar(
    ax: float,
    ay: float,
    bx: float,
    by: float,
    two_sided: bool,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    edt: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
):
    """Specular reflection of the move ``a -> b`` off the boundary.

    Up to ``MAX_REFLECTIONS`` mirror images are taken across the first edge crossed by the remaining segment. If the
    endpoint still escapes, it is replaced by its nearest boundary point, or by the last hit point when that
    projection would land farther than the step length from ``a``.

    Returns:
        (x, y, reflections): ``reflections`` is ``-1`` when the projection fallback was used.
    """
    step_len = math.hypot(bx - ax, by - ay)
    sx = ax
    sy = ay
    hx = ax
    hy = ay
    skip = -1
    for n_ref in range(MAX_REFLECTIONS + 1):
        t, e = first_crossing(sx, sy, bx, by, skip, two_sided, edges, starts, items, gx0, gy0, cell, nx, ny)
        if e < 0:
            return bx, by, n_ref
        if n_ref == MAX_REFLECTIONS:
            break
        hx = sx + t * (bx - sx)
        hy = sy + t * (by - sy)
        ex = edges[e, 2] - edges[e, 0]
        ey = edges[e, 3] - edges[e, 1]
        length = math.hypot(ex, ey)
        nxu = ey / length
        nyu = -ex / length
        proj = (bx - hx) * nxu + (by - hy) * nyu
        bx = bx - 2.0 * proj * nxu
        by = by - 2.0 * proj * nyu
        sx = hx
        sy = hy
        skip = e
    _, qx, qy, _ = nearest_edge(bx, by, edges, starts, items, edt, gx0, gy0, cell, nx, ny)
    if math.hypot(qx - ax, qy - ay) <= step_len:
        return qx, qy, -1
    return hx, hy, -1


@njit
def contains_polygon(
    px: float,
    py: float,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
) -> bool:
    """Even-odd ray casting towards +x, visiting only the grid row of the query point.

    An edge spanning several cells of the row is counted in the one cell that holds its crossing abscissa.
    """
    if not in_grid(px, py, gx0, gy0, cell, nx, ny):
        return False
    ci, cj = cell_of(px, py, gx0, gy0, cell, nx, ny)
    count = 0
    for i in range(ci, nx):
        c = cj * nx + i
        for k in range(starts[c], starts[c + 1]):
            e = items[k]
            x1 = edges[e, 0]
            y1 = edges[e, 1]
            x2 = edges[e, 2]
            y2 = edges[e, 3]
            if (y1 > py) == (y2 > py):
                continue
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            xc = min(max(xc, min(x1, x2)), max(x1, x2))
            if xc <= px:
                continue
            own, _ = cell_of(xc, py, gx0, gy0, cell, nx, ny)
            if own != i:
                continue
            count += 1
    return count % 2 == 1


@njit
def walk_planar(
    positions: np.ndarray,
    k0: int,
    k1: int,
    normals: np.ndarray,
    row0: int,
    sqrt_dt: float,
    two_sided: bool,
    has_z: bool,
    z_lo: float,
    z_hi: float,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    edt: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
) -> int:
    """Advance ``positions[k0] -> positions[k1]`` with reflected Gaussian steps; returns the number of fallbacks.

    Step ``k`` uses ``normals[k - row0]``. A step is taken without any boundary test while it stays inside the ball
    around the last anchor point whose radius is a lower bound on the anchor's boundary distance; otherwise the
    anchor is refreshed and, if still needed, the step goes through ``reflect_planar``. Both routes give the same
    result, so the anchor state never affects the path.
    """
    x = positions[k0, 0]
    y = positions[k0, 1]
    z = positions[k0, 2] if has_z else 0.0
    anchor_x = x
    anchor_y = y
    radius = distance_lower_bound(x, y, edt, gx0, gy0, cell, nx, ny)
    fallbacks = 0
    for k in range(k0, k1):
        r = k - row0
        dx = sqrt_dt * normals[r, 0]
        dy = sqrt_dt * normals[r, 1]
        step = math.hypot(dx, dy)
        moved = math.hypot(x - anchor_x, y - anchor_y)
        if moved + step >= radius:
            anchor_x = x
            anchor_y = y
            moved = 0.0
            radius = distance_lower_bound(x, y, edt, gx0, gy0, cell, nx, ny)
            if radius <= step:
                radius, _, _, _ = nearest_edge(x, y, edges, starts, items, edt, gx0, gy0, cell, nx, ny)
        if moved + step < radius:
            x += dx
            y += dy
        else:
            x, y, n_ref = reflect_planar(
                x, y, x + dx, y + dy, two_sided, edges, starts, items, edt, gx0, gy0, cell, nx, ny
            )
            if n_ref < 0:
                fallbacks += 1
        positions[k + 1, 0] = x
        positions[k + 1, 1] = y
        if has_z:
            z = fold_interval(z + sqrt_dt * normals[r, 2], z_lo, z_hi)
            positions[k + 1, 2] = z
    return fallbacks


@njit
def nearest_many(
    points: np.ndarray,
    eps: float,
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    edt: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
):
    """Boundary distances and nearest points for many planar points.

    Points whose cheap lower bound already exceeds ``eps`` are not resolved: their distance is reported as ``inf``
    and their projection as the point itself. Pass ``eps=inf`` to resolve everything.
    """
    n = points.shape[0]
    dist = np.empty(n, dtype=np.float64)
    proj = np.empty((n, 2), dtype=np.float64)
    for p in range(n):
        px = points[p, 0]
        py = points[p, 1]
        if distance_lower_bound(px, py, edt, gx0, gy0, cell, nx, ny) > eps:
            dist[p] = math.inf
            proj[p, 0] = px
            proj[p, 1] = py
            continue
        d, qx, qy, _ = nearest_edge(px, py, edges, starts, items, edt, gx0, gy0, cell, nx, ny)
        dist[p] = d
        proj[p, 0] = qx
        proj[p, 1] = qy
    return dist, proj


@njit
def count_proper_intersections(
    edges: np.ndarray,
    starts: np.ndarray,
    items: np.ndarray,
    gx0: float,
    gy0: float,
    cell: float,
    nx: int,
    ny: int,
    closed_chain: bool,
) -> int:
    """Number of pairs of non-adjacent edges that touch or cross.

    A pair is examined only in the cell holding the lower-left corner of the overlap of the two bounding boxes, which
    both edges are registered in.
    """
    n_edges = edges.shape[0]
    hits = 0
    for c in range(nx * ny):
        for ka in range(starts[c], starts[c + 1]):
            a = items[ka]
            for kb in range(ka + 1, starts[c + 1]):
                b = items[kb]
                lo = min(a, b)
                hi = max(a, b)
                if hi - lo == 1 or (closed_chain and lo == 0 and hi == n_edges - 1):
                    continue
                ox = max(min(edges[a, 0], edges[a, 2]), min(edges[b, 0], edges[b, 2]))
                oy = max(min(edges[a, 1], edges[a, 3]), min(edges[b, 1], edges[b, 3]))
                oi, oj = cell_of(ox, oy, gx0, gy0, cell, nx, ny)
                if oj * nx + oi != c:
                    continue
                if _segments_touch(edges, a, b):
                    hits += 1
    return hits


@njit
def _orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit
def _on_segment(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> bool:
    return min(ax, bx) <= cx <= max(ax, bx) and min(ay, by) <= cy <= max(ay, by)


@njit
def _segments_touch(edges: np.ndarray, a: int, b: int) -> bool:
    p1x = edges[a, 0]
    p1y = edges[a, 1]
    p2x = edges[a, 2]
    p2y = edges[a, 3]
    q1x = edges[b, 0]
    q1y = edges[b, 1]
    q2x = edges[b, 2]
    q2y = edges[b, 3]
    d1 = _orient(q1x, q1y, q2x, q2y, p1x, p1y)
    d2 = _orient(q1x, q1y, q2x, q2y, p2x, p2y)
    d3 = _orient(p1x, p1y, p2x, p2y, q1x, q1y)
    d4 = _orient(p1x, p1y, p2x, p2y, q2x, q2y)
    if ((d1 > 0.0 and d2 < 0.0) or (d1 < 0.0 and d2 > 0.0)) and ((d3 > 0.0 and d4 < 0.0) or (d3 < 0.0 and d4 > 0.0)):
        return True
    if d1 == 0.0 and _on_segment(q1x, q1y, q2x, q2y, p1x, p1y):
        return True
    if d2 == 0.0 and _on_segment(q1x, q1y, q2x, q2y, p2x, p2y):
        return True
    if d3 == 0.0 and _on_segment(p1x, p1y, p2x, p2y, q1x, q1y):
        return True
    if d4 == 0.0 and _on_segment(p1x, p1y, p2x, p2y, q2x, q2y):
        return True
    return False
