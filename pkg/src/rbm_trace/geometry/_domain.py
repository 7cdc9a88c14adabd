import functools
import hashlib
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Sequence, Tuple

import numpy as np

from rbm_trace.common.exc import DomainError, OutsideDomainError
from rbm_trace.common.serialization import canonical_json
from rbm_trace.common.utils import geo_log

from . import _kernels as K
from ._corridor import build_corridor_layout, in_cantor_product
from ._edge_index import EdgeIndex, build_edge_index

DomainKind = Literal["polygon", "snowflake", "product", "corridor"]
DOMAIN_KINDS: Tuple[str, ...] = ("polygon", "snowflake", "product", "corridor")

CLOSURE_TOL = 1e-12
MAX_SNOWFLAKE_LEVEL = 9
KOCH_DIMENSION = math.log(4.0) / math.log(3.0)

PointLike = Sequence[float]


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """A bounded open domain in the plane, or a planar domain times an interval.

    Polygonal kinds (``polygon``, ``snowflake``) carry counterclockwise ``vertices``; the boundary is the closed
    vertex chain. The ``corridor`` kind carries two-sided ``walls`` instead. The ``product`` kind wraps a planar
    domain (``planar``) and the open ``interval`` of the third coordinate.

    Instances are immutable; the edge index is built once at construction and shared by all queries.
    """

    kind: DomainKind
    ambient_dim: int
    bounding_box: np.ndarray
    vertices: Optional[np.ndarray] = None
    interval: Optional[Tuple[float, float]] = None
    analytic_boundary_dim: Optional[float] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    walls: Optional[np.ndarray] = None
    planar: Optional["DomainSpec"] = None
    start_point: Optional[np.ndarray] = None
    cantor: Optional[np.ndarray] = None
    index: EdgeIndex = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in DOMAIN_KINDS:
            raise DomainError(f"Unknown domain kind '{self.kind}'. Expected one of {DOMAIN_KINDS}.")
        if self.ambient_dim not in (2, 3):
            raise DomainError(f"ambient_dim must be 2 or 3, got {self.ambient_dim}.")
        d = self.analytic_boundary_dim
        if d is not None and not (self.ambient_dim - 1 <= d < self.ambient_dim):
            raise DomainError(
                f"analytic_boundary_dim={d} is outside [{self.ambient_dim - 1}, {self.ambient_dim}) for this domain."
            )
        if self.kind == "product":
            if self.planar is None or self.interval is None:
                raise DomainError("A product domain needs a planar factor and an interval.")
            index = self.planar.index
        elif self.kind == "corridor":
            if self.walls is None:
                raise DomainError("A corridor domain needs wall segments.")
            index = build_edge_index(self.walls)
        else:
            if self.vertices is None:
                raise DomainError(f"A {self.kind} domain needs vertices.")
            index = build_edge_index(_polygon_edges(self.vertices))
        object.__setattr__(self, "index", index)
        for arr in (self.bounding_box, self.vertices, self.walls, self.start_point, self.cantor):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def two_sided(self) -> bool:
        """Whether boundary segments are walls that block crossings in both directions."""
        return self.kind == "corridor"

    @property
    def planar_factor(self) -> "DomainSpec":
        return self.planar if self.planar is not None else self

    @property
    def n_edges(self) -> int:
        return int(self.index.edges.shape[0])

    @property
    def diameter(self) -> float:
        """Diameter of the bounding box."""
        return float(np.linalg.norm(self.bounding_box[:, 1] - self.bounding_box[:, 0]))

    def __repr__(self) -> str:
        return (
            f"DomainSpec(kind={self.kind!r}, ambient_dim={self.ambient_dim}, parameters={self.parameters}, "
            f"n_edges={self.n_edges}, analytic_boundary_dim={self.analytic_boundary_dim})"
        )


def _polygon_edges(vertices: np.ndarray) -> np.ndarray:
    return np.column_stack([vertices, np.roll(vertices, -1, axis=0)])


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _box_of(points: np.ndarray) -> np.ndarray:
    return np.column_stack([points.min(axis=0), points.max(axis=0)])


def _as_point(p: PointLike, dim: int) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64).reshape(-1)
    if arr.shape[0] != dim:
        raise DomainError(f"Expected a point with {dim} coordinates, got {arr.shape[0]}.")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"Point coordinates must be finite, got {arr.tolist()}.")
    return arr


# === Constructors ===


def make_polygon(vertices: Sequence[PointLike]) -> DomainSpec:
    """Domain bounded by a simple polygon.

    Clockwise input is reversed so that the stored vertex chain is counterclockwise.

    Args:
        vertices (Sequence[PointLike]): At least three planar vertices, without repeating the first one at the end.

    Returns:
        DomainSpec: A ``polygon`` domain with ``analytic_boundary_dim = 1``.

    Raises:
        DomainError: Too few, non-finite, repeated or self-intersecting vertices, or zero area.
    """
    verts = np.array(vertices, dtype=np.float64)
    if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
        raise DomainError(f"A polygon needs at least 3 planar vertices, got array of shape {verts.shape}.")
    if not np.all(np.isfinite(verts)):
        raise DomainError("Polygon vertices must be finite.")
    if np.any(np.all(verts == np.roll(verts, -1, axis=0), axis=1)):
        raise DomainError("Polygon has repeated consecutive vertices.")
    area = _signed_area(verts)
    if area == 0.0:
        raise DomainError("Polygon has zero area.")
    if area < 0.0:
        verts = verts[::-1].copy()

    index = build_edge_index(_polygon_edges(verts))
    crossings = K.count_proper_intersections(*index.kernel_args, *index.grid_args, True)
    if crossings:
        raise DomainError(f"Polygon is not simple: {crossings} pair(s) of non-adjacent edges intersect.")

    return DomainSpec(
        kind="polygon",
        ambient_dim=2,
        bounding_box=_box_of(verts),
        vertices=verts,
        analytic_boundary_dim=1.0,
    )


def make_square(side: float = 1.0) -> DomainSpec:
    """The square ``[0, side]^2``."""
    if not (math.isfinite(side) and side > 0.0):
        raise DomainError(f"Square side must be positive and finite, got {side}.")
    verts = np.array([[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])
    return DomainSpec(
        kind="polygon",
        ambient_dim=2,
        bounding_box=_box_of(verts),
        vertices=verts,
        analytic_boundary_dim=1.0,
        parameters={"side": float(side)},
    )


def koch_snowflake_vertices(level: int) -> np.ndarray:
    """Counterclockwise vertices of the level-``level`` Koch snowflake with circumradius 1, centred at the origin."""
    angles = np.pi / 2.0 + 2.0 * np.pi * np.arange(3) / 3.0
    z = np.exp(1j * angles)
    bump = np.exp(-1j * np.pi / 3.0)  # Clockwise turn: outward for a counterclockwise chain.
    for _ in range(level):
        d = (np.roll(z, -1) - z) / 3.0
        s1 = z + d
        tip = s1 + d * bump
        s2 = z + 2.0 * d
        z = np.column_stack([z, s1, tip, s2]).reshape(-1)
    return np.column_stack([z.real, z.imag])


def make_koch_snowflake(level: int, radius: float = 1.0) -> DomainSpec:
    """Koch snowflake prefractal with ``3 * 4 ** level`` edges and circumradius ``radius``, centred at the origin."""
    if not (isinstance(level, (int, np.integer)) and 0 <= level <= MAX_SNOWFLAKE_LEVEL):
        raise DomainError(f"Snowflake level must be an integer in [0, {MAX_SNOWFLAKE_LEVEL}], got {level}.")
    if not (math.isfinite(radius) and radius > 0.0):
        raise DomainError(f"Snowflake radius must be positive and finite, got {radius}.")
    verts = float(radius) * koch_snowflake_vertices(int(level))
    geo_log(f"Koch snowflake level {level}, radius {radius}: {verts.shape[0]} edges.")
    return DomainSpec(
        kind="snowflake",
        ambient_dim=2,
        bounding_box=_box_of(verts),
        vertices=verts,
        analytic_boundary_dim=KOCH_DIMENSION,
        parameters={"level": int(level), "radius": float(radius)},
    )


def make_product(planar: DomainSpec, height: float = 1.0) -> DomainSpec:
    """The 3-D domain ``planar x (0, height)``."""
    if planar.ambient_dim != 2:
        raise DomainError(f"The planar factor must have ambient_dim 2, got {planar.ambient_dim}.")
    if not (math.isfinite(height) and height > 0.0):
        raise DomainError(f"Product height must be positive and finite, got {height}.")
    d = planar.analytic_boundary_dim
    return DomainSpec(
        kind="product",
        ambient_dim=3,
        bounding_box=np.vstack([planar.bounding_box, [0.0, height]]),
        vertices=planar.vertices,
        interval=(0.0, float(height)),
        analytic_boundary_dim=None if d is None else 1.0 + d,
        parameters={"height": float(height)},
        planar=planar,
    )


def make_corridor_domain(generations: int, width_exponent: float = 3.0) -> DomainSpec:
    """Unit square minus a product of fat Cantor sets, cut into dyadic rooms joined by slits.

    Args:
        generations (int): Fat Cantor stage and room generation cap, in ``[1, 6]``.
        width_exponent (float): ``w >= 1``; a generation-``g`` slit has width ``min(exp(-g ** w), side / 2)``.

    Returns:
        DomainSpec: A ``corridor`` domain (no analytic boundary dimension).

    Raises:
        DomainError: Parameters out of range or a disconnected room graph.
    """
    layout = build_corridor_layout(int(generations), float(width_exponent))
    return DomainSpec(
        kind="corridor",
        ambient_dim=2,
        bounding_box=np.array([[0.0, 1.0], [0.0, 1.0]]),
        analytic_boundary_dim=None,
        parameters={
            "generations": int(generations),
            "width_exponent": float(width_exponent),
            "rooms": int(layout.rooms.shape[0]),
            "slits": int(layout.slits.shape[0]),
            "min_slit_width": float(layout.slit_widths.min()) if layout.slit_widths.size else None,
        },
        walls=layout.walls,
        start_point=layout.start_point,
        cantor=layout.cantor,
    )


# === Queries ===


def _planar_nearest(domain: DomainSpec, x: float, y: float) -> Tuple[float, float, float]:
    idx = domain.index
    d, qx, qy, _ = K.nearest_edge(x, y, *idx.kernel_args, idx.edt, *idx.grid_args)
    return d, qx, qy


def _planar_inside_raw(domain: DomainSpec, x: float, y: float) -> bool:
    """Inside test that ignores the boundary itself (on-boundary points may go either way)."""
    if domain.kind == "corridor":
        if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
            return False
        return not bool(in_cantor_product(np.array([[x, y]]), domain.cantor)[0])
    idx = domain.index
    return bool(K.contains_polygon(x, y, *idx.kernel_args, *idx.grid_args))


def _planar_contains(domain: DomainSpec, x: float, y: float) -> bool:
    if not _planar_inside_raw(domain, x, y):
        return False
    idx = domain.index
    if K.distance_lower_bound(x, y, idx.edt, *idx.grid_args) > 0.0:
        return True
    return _planar_nearest(domain, x, y)[0] > 0.0


def _planar_closure(domain: DomainSpec, x: float, y: float, tol: float) -> Tuple[bool, float]:
    d = _planar_nearest(domain, x, y)[0]
    return (d <= tol or _planar_inside_raw(domain, x, y)), d


def contains(domain: DomainSpec, p: PointLike) -> bool:
    """Whether ``p`` lies in the open domain."""
    q = _as_point(p, domain.ambient_dim)
    if domain.kind == "product":
        a, b = domain.interval  # type: ignore
        return a < q[2] < b and _planar_contains(domain.planar_factor, q[0], q[1])
    return _planar_contains(domain, q[0], q[1])


def in_closure(domain: DomainSpec, p: PointLike, tol: float = CLOSURE_TOL) -> bool:
    """Whether ``p`` lies in the closure of the domain, up to ``tol``."""
    q = _as_point(p, domain.ambient_dim)
    if domain.kind == "product":
        a, b = domain.interval  # type: ignore
        if not (a - tol <= q[2] <= b + tol):
            return False
        return _planar_closure(domain.planar_factor, q[0], q[1], tol)[0]
    return _planar_closure(domain, q[0], q[1], tol)[0]


def dist_to_boundary(domain: DomainSpec, p: PointLike) -> float:
    """Euclidean distance from a point of the closure to the boundary.

    Raises:
        OutsideDomainError: ``p`` is outside the closure (by more than ``CLOSURE_TOL``).
    """
    q = _as_point(p, domain.ambient_dim)
    planar = domain.planar_factor
    ok, d = _planar_closure(planar, q[0], q[1], CLOSURE_TOL)
    if domain.kind == "product":
        a, b = domain.interval  # type: ignore
        ok = ok and (a - CLOSURE_TOL <= q[2] <= b + CLOSURE_TOL)
        d = max(0.0, min(d, q[2] - a, b - q[2]))
    if not ok:
        raise OutsideDomainError(f"Point {q.tolist()} is outside the closure of the {domain.kind} domain.")
    return float(d)


def nearest_boundary_point(domain: DomainSpec, p: PointLike) -> np.ndarray:
    """The boundary point closest to ``p`` (ties resolved by edge order, then by the planar factor)."""
    q = _as_point(p, domain.ambient_dim)
    d, qx, qy = _planar_nearest(domain.planar_factor, q[0], q[1])
    if domain.kind != "product":
        return np.array([qx, qy])
    a, b = domain.interval  # type: ignore
    candidates = [(d, np.array([qx, qy, q[2]])), (abs(q[2] - a), np.array([q[0], q[1], a]))]
    candidates.append((abs(b - q[2]), np.array([q[0], q[1], b])))
    return min(candidates, key=lambda c: c[0])[1]


def boundary_distances(domain: DomainSpec, points: np.ndarray, eps: float = math.inf) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary distances and nearest boundary points of many closure points.

    Distances above ``eps`` are only guaranteed to be ``> eps`` (they may be reported as ``inf``), and the matching
    projections are then meaningless. Pass the default ``eps=inf`` for exact values everywhere.

    Args:
        domain (DomainSpec): The domain.
        points (np.ndarray): ``(N, ambient_dim)`` array.
        eps (float): Resolution threshold.

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(dist, proj)`` of shapes ``(N,)`` and ``(N, ambient_dim)``.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != domain.ambient_dim:
        raise DomainError(f"Expected an (N, {domain.ambient_dim}) point array, got shape {pts.shape}.")
    idx = domain.index
    planar_pts = np.ascontiguousarray(pts[:, :2])
    dist, proj2 = K.nearest_many(planar_pts, float(eps), *idx.kernel_args, idx.edt, *idx.grid_args)
    if domain.kind != "product":
        return dist, proj2
    a, b = domain.interval  # type: ignore
    z = pts[:, 2]
    to_floor = z - a
    to_ceiling = b - z
    proj = np.column_stack([proj2, z])
    use_floor = (to_floor < dist) & (to_floor <= to_ceiling)
    use_ceiling = (to_ceiling < dist) & ~use_floor
    proj[use_floor] = np.column_stack([pts[use_floor, :2], np.full(int(use_floor.sum()), a)])
    proj[use_ceiling] = np.column_stack([pts[use_ceiling, :2], np.full(int(use_ceiling.sum()), b)])
    out = np.maximum(np.minimum(np.minimum(dist, to_floor), to_ceiling), 0.0)
    return out, proj


def reflect_step(domain: DomainSpec, x_cur: PointLike, x_prop: PointLike) -> np.ndarray:
    """One reflected move from ``x_cur`` towards ``x_prop``.

    If the segment ``[x_cur, x_prop]`` crosses no boundary piece, ``x_prop`` is returned as is. Otherwise the
    endpoint is mirrored across the first edge crossed, repeatedly (at most 16 times); a still-escaping endpoint is
    projected back onto the boundary. The third coordinate of a product domain is folded into its interval.

    Raises:
        OutsideDomainError: ``x_cur`` is outside the closure.
    """
    cur = _as_point(x_cur, domain.ambient_dim)
    prop = _as_point(x_prop, domain.ambient_dim)
    if not in_closure(domain, cur):
        raise OutsideDomainError(f"Reflection start {cur.tolist()} is outside the closure of the {domain.kind} domain.")
    idx = domain.index
    x, y, _ = K.reflect_planar(
        cur[0], cur[1], prop[0], prop[1], domain.two_sided, *idx.kernel_args, idx.edt, *idx.grid_args
    )
    if domain.kind != "product":
        return np.array([x, y])
    a, b = domain.interval  # type: ignore
    return np.array([x, y, K.fold_interval(prop[2], a, b)])


def box_bounds(domain: DomainSpec) -> Optional[np.ndarray]:
    """Per-axis ``[lo, hi]`` rows when the domain is an axis-parallel box (a square, or a square times an interval),
    otherwise ``None``."""
    planar = domain.planar_factor
    if planar.kind != "polygon" or "side" not in planar.parameters:
        return None
    return np.array(domain.bounding_box)


def interior_point(domain: DomainSpec) -> np.ndarray:
    """A default start point strictly inside the domain.

    The vertex centroid for polygons when it is inside, otherwise the midpoint of the widest interior run of a
    horizontal line through it. The centre of the largest room for the corridor domain.
    """
    if domain.kind == "product":
        a, b = domain.interval  # type: ignore
        return np.append(interior_point(domain.planar_factor), 0.5 * (a + b))
    if domain.start_point is not None:
        return np.array(domain.start_point)
    verts = domain.vertices
    assert verts is not None
    centre = verts.mean(axis=0)
    if _planar_contains(domain, centre[0], centre[1]):
        return centre
    y = centre[1] + 1e-9 * domain.diameter
    edges = domain.index.edges
    y1, y2 = edges[:, 1], edges[:, 3]
    straddle = (y1 > y) != (y2 > y)
    e = edges[straddle]
    xs = np.sort(e[:, 0] + (y - e[:, 1]) * (e[:, 2] - e[:, 0]) / (e[:, 3] - e[:, 1]))
    runs = xs.reshape(-1, 2)
    widest = runs[np.argmax(runs[:, 1] - runs[:, 0])]
    return np.array([0.5 * (widest[0] + widest[1]), y])


# === Serialization ===


def domain_to_dict(domain: DomainSpec) -> Dict[str, Any]:
    """JSON-ready description from which ``domain_from_dict`` rebuilds an identical domain."""
    out: Dict[str, Any] = {
        "kind": domain.kind,
        "ambient_dim": domain.ambient_dim,
        "parameters": {k: v for k, v in domain.parameters.items()},
        "analytic_boundary_dim": domain.analytic_boundary_dim,
    }
    if domain.kind == "product":
        out["interval"] = list(domain.interval)  # type: ignore
        out["planar"] = domain_to_dict(domain.planar_factor)
    elif domain.vertices is not None:
        out["vertices"] = domain.vertices.tolist()
    return out


def domain_from_dict(d: Dict[str, Any]) -> DomainSpec:
    try:
        kind = d["kind"]
        params = d.get("parameters", {})
        if kind == "product":
            return make_product(domain_from_dict(d["planar"]), height=params["height"])
        if kind == "snowflake":
            return make_koch_snowflake(int(params["level"]), float(params.get("radius", 1.0)))
        if kind == "corridor":
            return make_corridor_domain(int(params["generations"]), float(params["width_exponent"]))
        if kind == "polygon":
            if "side" in params:
                return make_square(float(params["side"]))
            return make_polygon(d["vertices"])
    except KeyError as e:
        raise DomainError(f"Domain document is missing key {e}.") from e
    raise DomainError(f"Unknown domain kind '{d.get('kind')}'. Expected one of {DOMAIN_KINDS}.")


@functools.lru_cache(maxsize=64)
def domain_id(domain: DomainSpec) -> str:
    """Stable 16-hex-digit content hash of a domain (kind, parameters and boundary geometry)."""
    header = {k: v for k, v in domain_to_dict(domain).items() if k not in ("vertices", "planar")}
    h = hashlib.blake2b(canonical_json(header).encode("utf-8"), digest_size=8)
    h.update(np.ascontiguousarray(domain.index.edges).tobytes())
    if domain.planar is not None:
        h.update(domain_id(domain.planar).encode("ascii"))
    return h.hexdigest()
