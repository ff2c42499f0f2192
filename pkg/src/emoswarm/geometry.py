"""Bounded Voronoi partitions and density-weighted cell centroids.

Cells are built by clipping the domain rectangle against perpendicular
bisector half-planes, one robot at a time. That is O(N^2) overall, which is
fine for the few dozen robots a swarm behavior uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

# Minimum separation between two sites before they are treated as coincident.
MIN_SEPARATION = 1e-9
# Below this density integral a cell has no usable center of mass.
MIN_MASS = 1e-12
DEFAULT_QUADRATURE = 128


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DuplicatePosition(GeometryError):
    pass


class OutOfDomain(GeometryError):
    pass


class ZeroMass(GeometryError):
    pass


class DegenerateCell(GeometryError):
    pass


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangular workspace, in meters."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate domain: x [{self.x_min}, {self.x_max}], "
                f"y [{self.y_min}, {self.y_max}]"
            )

    @classmethod
    def from_size(cls, width: float, height: float) -> "Domain":
        """Domain with its lower-left corner at the origin."""
        return cls(0.0, float(width), 0.0, float(height))

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max)])

    @property
    def min_side(self) -> float:
        return min(self.width, self.height)

    def corners(self) -> np.ndarray:
        """Rectangle vertices, counterclockwise from the lower-left corner."""
        return np.array(
            [
                [self.x_min, self.y_min],
                [self.x_max, self.y_min],
                [self.x_max, self.y_max],
                [self.x_min, self.y_max],
            ]
        )

    def contains(self, points, strict: bool = True) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        x, y = p[..., 0], p[..., 1]
        if strict:
            return (x > self.x_min) & (x < self.x_max) & (y > self.y_min) & (y < self.y_max)
        return (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "y_min": self.y_min, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, d: dict) -> "Domain":
        return cls(float(d["x_min"]), float(d["x_max"]), float(d["y_min"]), float(d["y_max"]))


@dataclass(frozen=True, eq=False)
class VoronoiCell:
    """Convex cell owned by one robot; vertices are counterclockwise."""

    owner: int
    vertices: np.ndarray

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        """Vectorized point-in-convex-polygon test (boundary counts as inside)."""
        return _inside_convex(self.vertices, np.asarray(points, dtype=float), tol)

    def edge_distance(self, points) -> np.ndarray:
        """Unsigned distance from each point to the nearest cell edge line."""
        pts = np.asarray(points, dtype=float)
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        length = np.hypot(e[:, 0], e[:, 1])
        cross = e[:, 0] * (pts[..., None, 1] - v[:, 1]) - e[:, 1] * (pts[..., None, 0] - v[:, 0])
        return np.min(np.abs(cross) / length, axis=-1)


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; positive for counterclockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(vertices: np.ndarray) -> np.ndarray:
    """Exact area centroid of a simple polygon (uniform density)."""
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
    a = 0.5 * cross.sum()
    cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * a)
    cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * a)
    return np.array([cx, cy])


def _inside_convex(vertices: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    v = vertices
    e = np.concatenate([v[1:], v[:1]]) - v
    # z-component of edge x (point - vertex); >= 0 on the left of every CCW edge
    cross = e[:, 0] * (pts[..., None, 1] - v[:, 1]) - e[:, 1] * (pts[..., None, 0] - v[:, 0])
    scale = np.hypot(e[:, 0], e[:, 1])
    return np.all(cross >= -tol * scale, axis=-1)


def clip_halfplane(poly, normal, offset: float) -> np.ndarray:
    """Keep the part of a convex polygon where ``normal . q <= offset``."""
    return np.array(_clip(_as_tuples(poly), float(normal[0]), float(normal[1]), float(offset))).reshape(-1, 2)


def _as_tuples(poly) -> list[tuple[float, float]]:
    return [(float(x), float(y)) for x, y in np.asarray(poly, dtype=float)]


def _clip(poly: list, nx: float, ny: float, offset: float, eps: float = 1e-14) -> list:
    s = [nx * x + ny * y - offset for x, y in poly]
    if max(s) <= 0.0:
        return poly
    if min(s) > 0.0:
        return []
    out = []
    n = len(poly)
    for k in range(n):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % n]
        sa, sb = s[k], s[(k + 1) % n]
        if sa <= 0.0:
            out.append((ax, ay))
        if (sa <= 0.0) != (sb <= 0.0):
            r = sa / (sa - sb)
            out.append((ax + r * (bx - ax), ay + r * (by - ay)))
    # drop repeated vertices produced by cuts through a corner
    dedup = [q for k, q in enumerate(out) if max(abs(q[0] - out[k - 1][0]), abs(q[1] - out[k - 1][1])) > eps]
    return dedup


def validate_positions(positions, domain: Domain) -> np.ndarray:
    p = np.asarray(positions, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) == 0:
        raise GeometryError(f"positions must be a non-empty (N, 2) array, got shape {p.shape}")
    outside = ~domain.contains(p, strict=True)
    if outside.any():
        i = int(np.flatnonzero(outside)[0])
        raise OutOfDomain(f"robot {i} at {tuple(p[i])} is outside the domain")
    if len(p) > 1:
        diff = p[:, None, :] - p[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[i, j] < MIN_SEPARATION:
            raise DuplicatePosition(f"robots {min(i, j)} and {max(i, j)} coincide")
    return p


def compute_voronoi(positions, domain: Domain) -> list[VoronoiCell]:
    """Voronoi partition of ``domain`` generated by ``positions``.

    Raises
    ------
    OutOfDomain
        If any site is not strictly inside the domain.
    DuplicatePosition
        If two sites are closer than ``MIN_SEPARATION``.
    """
    p = validate_positions(positions, domain)
    rect = _as_tuples(domain.corners())
    pts = _as_tuples(p)
    sq = np.einsum("ij,ij->i", p, p)
    cells = []
    for i, (xi, yi) in enumerate(pts):
        poly = rect
        d2 = np.einsum("ij,ij->i", p - p[i], p - p[i])
        # nearest sites first; once a bisector is farther than every vertex, stop
        for j in np.argsort(d2):
            if j == i:
                continue
            reach = max((x - xi) ** 2 + (y - yi) ** 2 for x, y in poly)
            if d2[j] > 4.0 * reach:
                break
            xj, yj = pts[j]
            poly = _clip(poly, xj - xi, yj - yi, 0.5 * (sq[j] - sq[i]))
            if len(poly) < 3:
                break
        v = np.array(poly, dtype=float).reshape(-1, 2)
        if len(v) < 3 or polygon_area(v) <= 0.0:
            raise DegenerateCell(f"cell of robot {i} collapsed")
        cells.append(VoronoiCell(owner=i, vertices=v))
    return cells


def nearest_site(points, positions) -> np.ndarray:
    """Index of the closest site for each point; ties go to the lower index."""
    q = np.asarray(points, dtype=float)
    p = np.asarray(positions, dtype=float)
    d = ((q[..., None, :] - p) ** 2).sum(axis=-1)
    return np.argmin(d, axis=-1)


def _cell_samples(vertices: np.ndarray, resolution: int):
    """Bounding-box midpoints that fall inside a CCW convex polygon, with weights.

    Each grid row meets the polygon in one x-interval, found from the edge
    half-planes, so the membership test costs O(rows * edges).
    """
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    h = (hi - lo) / resolution
    xs = lo[0] + (np.arange(resolution) + 0.5) * h[0]
    ys = lo[1] + (np.arange(resolution) + 0.5) * h[1]
    v = vertices
    e = np.concatenate([v[1:], v[:1]]) - v
    # inside iff e_x (y - v_y) - e_y (x - v_x) >= 0 for every edge
    rhs = e[:, 0] * (ys[:, None] - v[:, 1]) + e[:, 1] * v[:, 0]  # (rows, edges)
    ey = e[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = rhs / ey
    x_lo = np.max(np.where(ey < 0, bound, -np.inf), axis=1)
    x_hi = np.min(np.where(ey > 0, bound, np.inf), axis=1)
    flat = ey == 0
    if flat.any():
        ok = np.all(rhs[:, flat] - ey[flat] * v[flat, 0] >= 0, axis=1)
        x_hi = np.where(ok, x_hi, -np.inf)
    mask = (xs[None, :] >= x_lo[:, None]) & (xs[None, :] <= x_hi[:, None])
    r, c = np.nonzero(mask)
    pts = np.stack((xs[c], ys[r]), axis=1)
    w = np.full(len(pts), h[0] * h[1])
    # samples lying exactly on a slanted edge count half
    eps = 1e-9 * h[0]
    x = pts[:, 0]
    on_edge = (np.abs(x - x_lo[r]) <= eps) | (np.abs(x - x_hi[r]) <= eps)
    w[on_edge] *= 0.5
    return pts, w


def cell_mass_and_centroid(
    cell: VoronoiCell,
    density: Callable[[np.ndarray], np.ndarray],
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> tuple[float, np.ndarray]:
    """Midpoint-rule mass and center of mass of ``density`` over ``cell``.

    The bounding box of the cell is split into ``resolution x resolution``
    midpoint samples; samples outside the polygon are rejected.
    """
    if quadrature_resolution < 1:
        raise ValueError("quadrature_resolution must be a positive integer")
    v = np.asarray(cell.vertices, dtype=float)
    if len(v) < 3 or polygon_area(v) <= 0.0:
        raise DegenerateCell(f"cell of robot {cell.owner} has no area")
    pts, da = _cell_samples(v, int(quadrature_resolution))
    if len(pts) == 0:
        # sliver thinner than one grid spacing: fall back to a one-point rule
        pts = polygon_centroid(v)[None, :]
        da = np.array([polygon_area(v)])
    w = np.asarray(density(pts), dtype=float) * da
    mass = float(w.sum())
    if not mass >= MIN_MASS:
        raise ZeroMass(f"density integral over cell {cell.owner} is {mass:.3g}")
    return mass, (w @ pts) / mass


def cell_centroid(
    cell: VoronoiCell,
    density: Callable[[np.ndarray], np.ndarray],
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Density-weighted center of mass of a Voronoi cell."""
    return cell_mass_and_centroid(cell, density, quadrature_resolution)[1]


def centroids(
    positions,
    density: Callable[[np.ndarray], np.ndarray],
    domain: Domain,
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> tuple[list[VoronoiCell], np.ndarray]:
    """Voronoi cells and their centroids for every robot."""
    cells = compute_voronoi(positions, domain)
    return cells, cell_centroids(cells, density, quadrature_resolution)


def cell_centroids(
    cells: Sequence[VoronoiCell],
    density: Callable[[np.ndarray], np.ndarray],
    quadrature_resolution: int = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """``(N, 2)`` centroids of ``cells``, in order."""
    if len(cells) == 0:
        return np.empty((0, 2))
    return np.array([cell_centroid(cell, density, quadrature_resolution) for cell in cells])


# Degree-5, 7-point symmetric rule on the reference triangle (barycentric, weights sum to 1).
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_TRI_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _B1, _B1],
        [_B1, _A1, _B1],
        [_B1, _B1, _A1],
        [_A2, _B2, _B2],
        [_B2, _A2, _B2],
        [_B2, _B2, _A2],
    ]
)
_TRI_W = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)


@lru_cache(maxsize=8)
def _subdivided_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes/weights of the 7-point rule on an m x m triangle subdivision."""
    nodes, weights = [], []
    for i in range(m):
        for j in range(m - i):
            # upright sub-triangle
            tri = np.array([[i, j], [i + 1, j], [i, j + 1]], dtype=float) / m
            nodes.append(_TRI_BARY @ tri)
            if i + j < m - 1:
                tri = np.array([[i + 1, j], [i + 1, j + 1], [i, j + 1]], dtype=float) / m
                nodes.append(_TRI_BARY @ tri)
    st = np.concatenate(nodes)
    bary = np.column_stack([1.0 - st.sum(axis=1), st])
    weights = np.tile(_TRI_W, len(nodes)) / len(nodes)
    return bary, weights


def _fan_triangles(vertices: np.ndarray, apex: np.ndarray) -> np.ndarray:
    """(T, 3, 2) fan of a polygon from ``apex``."""
    v = np.asarray(vertices, dtype=float)
    c = np.concatenate([v[1:], v[:1]])
    return np.stack([np.broadcast_to(apex, v.shape), v, c], axis=1)


def _fan_moment(tris: np.ndarray, apex: np.ndarray, density, subdivisions: int) -> float:
    # apex has one row per triangle
    bary, w = _subdivided_rule(max(1, int(subdivisions)))
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    areas = 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1]))
    q = np.einsum("kj,tjd->tkd", bary, tris)
    f = ((q - apex[:, None, :]) ** 2).sum(axis=-1) * np.asarray(density(q.reshape(-1, 2))).reshape(q.shape[:2])
    return float((f @ w) @ areas)


def polygon_moment(
    vertices: np.ndarray,
    about: np.ndarray,
    density: Callable[[np.ndarray], np.ndarray],
    subdivisions: int = 8,
) -> float:
    """Integral of ``|q - about|^2 * density(q)`` over a convex polygon.

    Fan-triangulates from ``about`` (which must lie in the polygon) and applies
    a subdivided degree-5 triangle rule, so the result varies smoothly with the
    vertices. Exact for constant densities.
    """
    a = np.asarray(about, dtype=float)
    tris = _fan_triangles(vertices, a)
    return _fan_moment(tris, tris[:, 0], density, subdivisions)


def locational_cost(
    positions,
    density: Callable[[np.ndarray], np.ndarray],
    domain: Domain,
    quadrature_resolution: int = DEFAULT_QUADRATURE,
    cells: Sequence[VoronoiCell] | None = None,
) -> float:
    """Coverage cost: summed second moment of each cell about its robot.

    Each cell is fan-triangulated from its robot and integrated with a
    subdivided triangle rule (``quadrature_resolution // 32`` subdivisions per
    side). Pass ``cells`` to reuse a partition already computed for
    ``positions``.
    """
    p = validate_positions(positions, domain)
    if cells is None:
        cells = compute_voronoi(p, domain)
    sub = max(1, int(quadrature_resolution) // 32)
    # one batched quadrature over every cell's fan
    tris = np.concatenate([_fan_triangles(cell.vertices, p[cell.owner]) for cell in cells])
    return _fan_moment(tris, tris[:, 0], density, sub)


def tiling_error(cells: Sequence[VoronoiCell], domain: Domain) -> float:
    """Relative mismatch between the summed cell areas and the domain area."""
    return abs(sum(c.area for c in cells) - domain.area) / domain.area
