"""Star-shaped domain geometry on radial grids.

A domain is stored as a radial function over a fixed grid of unit directions
anchored at a star center: boundary(theta) = center + rho(theta) * theta.
This representation is star-shaped with respect to the center by
construction.  Dimensions 1, 2 and 3 are supported; normal vectors, interior
ball radii, and convex hulls are 2-D only (1-D where trivial).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

_UNIT_TOL = 1e-12
_HULL_SLACK = 1e-9

DEFAULT_GRID_SIZES = {1: 2, 2: 256, 3: 1024}


@dataclass(frozen=True)
class DirectionGrid:
    """Unit directions discretizing the sphere of directions.

    d=1 uses {+1, -1}; d=2 uses n equally spaced angles starting at 0;
    d=3 uses a Fibonacci lattice on the sphere.
    """

    dimension: int
    directions: np.ndarray  # (n, d), unit rows
    angles: np.ndarray | None = None  # (n,) for d=2, ascending in [0, 2pi)

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != self.dimension:
            raise ValueError("directions must have shape (n, dimension)")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise ValueError("directions must be unit vectors (tol 1e-12)")
        if self.dimension == 1 and dirs.shape[0] != 2:
            raise ValueError("d=1 requires exactly the two directions +1, -1")
        order = np.lexsort(dirs.T)
        sorted_dirs = dirs[order]
        if dirs.shape[0] > 1 and np.any(
            np.all(np.diff(sorted_dirs, axis=0) == 0.0, axis=1)
        ):
            raise ValueError("directions must be pairwise distinct")
        dirs.flags.writeable = False
        object.__setattr__(self, "directions", dirs)
        if self.angles is not None:
            ang = np.asarray(self.angles, dtype=float)
            ang.flags.writeable = False
            object.__setattr__(self, "angles", ang)

    @property
    def n(self) -> int:
        return self.directions.shape[0]

    @staticmethod
    def make(dimension: int, n: int | None = None) -> "DirectionGrid":
        """Standard grid of ``n`` directions in the given dimension."""
        if dimension not in (1, 2, 3):
            raise ValueError(f"unsupported dimension {dimension}")
        if n is None:
            n = DEFAULT_GRID_SIZES[dimension]
        if dimension == 1:
            return DirectionGrid(1, np.array([[1.0], [-1.0]]))
        if dimension == 2:
            angles = 2.0 * np.pi * np.arange(n) / n
            dirs = np.column_stack([np.cos(angles), np.sin(angles)])
            return DirectionGrid(2, dirs, angles=angles)
        # Fibonacci sphere lattice
        i = np.arange(n)
        z = 1.0 - (2.0 * i + 1.0) / n
        phi = i * math.pi * (3.0 - math.sqrt(5.0))
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        dirs = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        return DirectionGrid(3, dirs)


@dataclass(frozen=True)
class RadialDomain:
    """Star-shaped domain: boundary(theta) = center + rho(theta) * theta."""

    center: np.ndarray
    grid: DirectionGrid
    radii: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        r = np.asarray(self.radii, dtype=float).reshape(-1)
        if c.shape[0] != self.grid.dimension:
            raise ValueError("center dimension does not match grid")
        if r.shape[0] != self.grid.n:
            raise ValueError("need one radius per grid direction")
        if np.any(r <= 0.0) or not np.all(np.isfinite(r)):
            raise ValueError("radii must be positive and finite")
        c.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(
            self, "_is_ball",
            bool(np.all(np.abs(r - r[0]) <= 1e-12 * max(1.0, r[0]))),
        )

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def is_ball(self) -> bool:
        return self._is_ball


@dataclass(frozen=True)
class BallSpec:
    """Open ball of radius r centered at xi."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        c = np.asarray(self.center, dtype=float).reshape(-1)
        c.flags.writeable = False
        object.__setattr__(self, "center", c)


@dataclass(frozen=True)
class Halfspace:
    """H = {x : x . e > t} with unit direction e."""

    e: np.ndarray
    t: float

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float).reshape(-1)
        if abs(np.linalg.norm(e) - 1.0) > _UNIT_TOL:
            raise ValueError("halfspace direction must be a unit vector")
        e.flags.writeable = False
        object.__setattr__(self, "e", e)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def ball_domain(center, radius: float, n: int | None = None) -> RadialDomain:
    """Ball as a RadialDomain (exact: constant radial function)."""
    center = np.asarray(center, dtype=float).reshape(-1)
    grid = DirectionGrid.make(center.shape[0], n)
    return RadialDomain(center, grid, np.full(grid.n, float(radius)))


def ellipse_domain(center, a: float, b: float, n: int | None = None) -> RadialDomain:
    """Axis-aligned ellipse with semi-axes a (x) and b (y), d=2 only."""
    center = np.asarray(center, dtype=float).reshape(-1)
    if center.shape[0] != 2:
        raise ValueError("ellipse_domain is 2-D only")
    grid = DirectionGrid.make(2, n)
    phi = grid.angles
    rho = a * b / np.sqrt((b * np.cos(phi)) ** 2 + (a * np.sin(phi)) ** 2)
    return RadialDomain(center, grid, rho)


def domain_from_ball(spec: BallSpec, n: int | None = None) -> RadialDomain:
    return ball_domain(spec.center, spec.radius, n)


# ---------------------------------------------------------------------------
# radial interpolation
# ---------------------------------------------------------------------------

def _interp_radius_batch(dom: RadialDomain, offsets: np.ndarray) -> np.ndarray:
    """Radius of dom in the direction of each offset vector (m, d).

    Linear in angle for d=2, by sign for d=1, nearest grid direction for d=3.
    Offsets of zero length get the first grid radius (value is irrelevant for
    containment: the center is always inside).
    """
    d = dom.dimension
    if d == 1:
        pos = offsets[:, 0] >= 0.0
        return np.where(pos, dom.radii[0], dom.radii[1])
    if d == 2:
        phi = np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2.0 * np.pi)
        ang = dom.grid.angles
        xp = np.concatenate([ang, [ang[0] + 2.0 * np.pi]])
        fp = np.concatenate([dom.radii, [dom.radii[0]]])
        return np.interp(phi, xp, fp)
    # d == 3: nearest neighbor by maximal dot product, chunked
    out = np.empty(offsets.shape[0])
    dirs = dom.grid.directions
    chunk = 4096
    for lo in range(0, offsets.shape[0], chunk):
        block = offsets[lo : lo + chunk]
        idx = np.argmax(block @ dirs.T, axis=1)
        out[lo : lo + chunk] = dom.radii[idx]
    return out


def interp_radius(dom: RadialDomain, theta) -> float:
    """Interpolated radial function at one unit direction."""
    theta = np.asarray(theta, dtype=float).reshape(1, -1)
    return float(_interp_radius_batch(dom, theta)[0])


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

def contains_many(dom: RadialDomain, pts: np.ndarray, closed: bool = False,
                  tol: float = 0.0) -> np.ndarray:
    """Vectorized membership test for points of shape (m, d).

    ``closed`` includes the boundary; ``tol`` admits points whose radial
    excess is at most ``tol`` (useful for tangency checks).
    """
    pts = np.asarray(pts, dtype=float)
    offsets = pts - dom.center
    dist = np.linalg.norm(offsets, axis=1)
    if dom.is_ball():
        rho = dom.radii[0]
    else:
        rho = _interp_radius_batch(dom, offsets)
    if closed:
        return dist <= rho + tol
    return dist < rho + tol


def contains(dom: RadialDomain, x, closed: bool = False) -> bool:
    """True iff x lies in the (open) domain; the center always does."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != dom.dimension:
        raise ValueError("point dimension does not match domain")
    return bool(contains_many(dom, x[None, :], closed=closed)[0])


def boundary_point(dom: RadialDomain, theta) -> np.ndarray:
    """Boundary point center + rho(theta) * theta for a unit direction."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    return dom.center + interp_radius(dom, theta) * theta


def boundary_points(dom: RadialDomain) -> np.ndarray:
    """All grid boundary samples, shape (n, d)."""
    return dom.center + dom.radii[:, None] * dom.grid.directions


def radial_derivative(dom: RadialDomain) -> np.ndarray:
    """d rho / d phi at the grid nodes by centered differences (d=2)."""
    if dom.dimension != 2:
        raise ValueError("radial_derivative requires d=2")
    h = 2.0 * np.pi / dom.grid.n
    return (np.roll(dom.radii, -1) - np.roll(dom.radii, 1)) / (2.0 * h)


def inward_normal(dom: RadialDomain, theta) -> np.ndarray:
    """Unit inward normal at boundary_point(dom, theta).

    Uses the polar-curve normal  n propto -(rho * theta - rho' * theta_perp)
    with rho' from centered finite differences.  d=3 is unsupported.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if dom.dimension == 1:
        return -theta
    if dom.dimension == 3:
        raise ValueError("inward_normal is unsupported for d=3")
    phi = float(np.mod(np.arctan2(theta[1], theta[0]), 2.0 * np.pi))
    ang = dom.grid.angles
    dr = radial_derivative(dom)
    xp = np.concatenate([ang, [ang[0] + 2.0 * np.pi]])
    rho = float(np.interp(phi, xp, np.concatenate([dom.radii, [dom.radii[0]]])))
    rho_p = float(np.interp(phi, xp, np.concatenate([dr, [dr[0]]])))
    theta_perp = np.array([-theta[1], theta[0]])
    n = -(rho * theta - rho_p * theta_perp)
    return n / np.linalg.norm(n)


def inward_normals(dom: RadialDomain) -> np.ndarray:
    """Inward normals at every grid node, shape (n, 2); d=2 only."""
    if dom.dimension != 2:
        raise ValueError("inward_normals requires d=2")
    dirs = dom.grid.directions
    perps = np.column_stack([-dirs[:, 1], dirs[:, 0]])
    n = -(dom.radii[:, None] * dirs - radial_derivative(dom)[:, None] * perps)
    return n / np.linalg.norm(n, axis=1)[:, None]


def distance_to_sampled_boundary(dom: RadialDomain, pts: np.ndarray) -> np.ndarray:
    """Distance from each point to the sampled boundary of ``dom``.

    Exact for constant-radius domains (distance to the sphere); otherwise the
    minimum over the grid boundary samples, computed in chunks.
    """
    pts = np.asarray(pts, dtype=float)
    if dom.is_ball():
        return np.abs(np.linalg.norm(pts - dom.center, axis=1) - dom.radii[0])
    bpts = boundary_points(dom)
    bsq = np.sum(bpts * bpts, axis=1)
    out = np.empty(pts.shape[0])
    chunk = max(1, (1 << 22) // max(1, bpts.shape[0]))
    for lo in range(0, pts.shape[0], chunk):
        block = pts[lo : lo + chunk]
        # locate the nearest sample via |p|^2 + |b|^2 - 2 p.b (fast but
        # cancellation-prone), then recompute that one distance stably
        d2 = np.sum(block * block, axis=1)[:, None] + bsq[None, :] - 2.0 * (block @ bpts.T)
        nearest = np.argmin(d2, axis=1)
        out[lo : lo + chunk] = np.linalg.norm(block - bpts[nearest], axis=1)
    return out


def boundary_distance(a: RadialDomain, b: RadialDomain) -> float:
    """Minimum distance between the sampled boundaries of two domains."""
    if a.dimension != b.dimension:
        raise ValueError("domains must share a dimension")
    if b.is_ball():
        return float(np.min(distance_to_sampled_boundary(b, boundary_points(a))))
    if a.is_ball():
        return float(np.min(distance_to_sampled_boundary(a, boundary_points(b))))
    return _min_pairwise(boundary_points(a), boundary_points(b))


def _min_pairwise(pa: np.ndarray, pb: np.ndarray) -> float:
    best = np.inf
    chunk = max(1, (1 << 22) // max(1, pb.shape[0]))
    for lo in range(0, pa.shape[0], chunk):
        diff = pa[lo : lo + chunk, None, :] - pb[None, :, :]
        best = min(best, float(np.min(np.sum(diff * diff, axis=2))))
    return math.sqrt(best)


def interior_ball_radius(dom: RadialDomain, ball_test_points: int = 64,
                         rel_tol: float = 1e-4) -> float:
    """Largest r such that every boundary sample is touched from inside by a
    ball of radius r contained in the domain.

    Constant-radius domains return their radius exactly (any d); otherwise
    the estimate is a bisection over r with per-boundary-point inclusion
    sampling, d=2 only.  The result is a grid-level estimate; callers should
    report the grid resolution alongside it.
    """
    if dom.is_ball():
        return float(dom.radii[0])
    if dom.dimension != 2:
        raise ValueError("interior_ball_radius is d=2 only (except balls)")
    if dom.grid.n < 64:
        raise ValueError("interior_ball_radius needs a grid of at least 64")
    bpts = boundary_points(dom)
    normals = inward_normals(dom)
    psi = 2.0 * np.pi * np.arange(ball_test_points) / ball_test_points
    ring = np.column_stack([np.cos(psi), np.sin(psi)])  # (k, 2)
    scale = float(np.max(dom.radii))
    # the radial interpolant sags O(h^2) below a smooth boundary between
    # nodes; the inclusion slack must absorb that or every tangent ball is
    # rejected by the interpolation corners
    h = 2.0 * np.pi / dom.grid.n
    slack = max(1e-7, h * h) * scale

    def feasible(r: float) -> bool:
        centers = bpts + r * normals  # (n, 2)
        test = centers[:, None, :] + r * ring[None, :, :]
        ok = contains_many(dom, test.reshape(-1, 2), closed=True, tol=slack)
        return bool(np.all(ok))

    lo, hi = 0.0, scale
    if feasible(hi):
        return hi
    while hi - lo > rel_tol * scale * 0.5:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# convex hull (planar, monotone chain)
# ---------------------------------------------------------------------------

def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices of 2-D points in counterclockwise order."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] < 3:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def hull_contains(hull: np.ndarray, x, slack: float = _HULL_SLACK) -> bool:
    """Point-in-convex-polygon with absolute slack on the edges."""
    x = np.asarray(x, dtype=float).reshape(-1)
    nxt = np.roll(hull, -1, axis=0)
    edge = nxt - hull
    rel = x[None, :] - hull
    cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    return bool(np.all(cross >= -slack))


def convex_hull_contains(dom: RadialDomain, x) -> bool:
    """True iff x lies in the convex hull of the sampled boundary (d=2)."""
    if dom.dimension != 2:
        raise ValueError("convex_hull_contains is d=2 only")
    return hull_contains(convex_hull(boundary_points(dom)), x)


# ---------------------------------------------------------------------------
# reflections
# ---------------------------------------------------------------------------

def reflect(x, H: Halfspace) -> np.ndarray:
    """Reflection across the hyperplane {x . e = t}: x - 2(x.e)e + 2te."""
    x = np.asarray(x, dtype=float)
    dots = x @ H.e
    return x - 2.0 * np.multiply.outer(dots, H.e) + 2.0 * H.t * H.e


# ---------------------------------------------------------------------------
# re-anchoring (radial resampling about a new star center)
# ---------------------------------------------------------------------------

def resample_about(dom: RadialDomain, x0, grid: DirectionGrid | None = None) -> RadialDomain:
    """Re-anchor the domain's radial function at a new center.

    Casts a ray from x0 along every grid direction and intersects it with the
    sampled boundary (a closed polygon for d=2).  Raises if some ray misses,
    i.e. the domain is not star-shaped about x0 at grid level.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != dom.dimension:
        raise ValueError("x0 dimension does not match domain")
    if grid is None:
        grid = dom.grid
    if dom.dimension == 1:
        right = (dom.center[0] + dom.radii[0]) - x0[0]
        left = x0[0] - (dom.center[0] - dom.radii[1])
        if right <= 0 or left <= 0:
            raise ValueError("domain is not star-shaped about x0")
        return RadialDomain(x0, grid, np.array([right, left]))
    if dom.dimension != 2:
        raise ValueError("resample_about supports d=1 and d=2")
    if np.allclose(x0, dom.center) and grid is dom.grid:
        return dom
    poly = boundary_points(dom)
    radii = np.empty(grid.n)
    for i, u in enumerate(grid.directions):
        t = _ray_polygon_intersection(x0, u, poly)
        if t is None:
            raise ValueError("domain is not star-shaped about x0")
        radii[i] = t
    return RadialDomain(x0, grid, radii)


def _ray_polygon_intersection(origin: np.ndarray, u: np.ndarray,
                              poly: np.ndarray) -> float | None:
    """Largest positive ray parameter hitting the closed polygon, or None."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    e = b - a
    # solve origin + t u = a + s e  per segment
    denom = u[0] * (-e[:, 1]) - u[1] * (-e[:, 0])
    rhs = a - origin
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (rhs[:, 0] * (-e[:, 1]) - rhs[:, 1] * (-e[:, 0])) / denom
        s = (u[0] * rhs[:, 1] - u[1] * rhs[:, 0]) / denom
    ok = np.isfinite(t) & np.isfinite(s) & (s >= -1e-12) & (s <= 1.0 + 1e-12) & (t > 1e-12)
    if not np.any(ok):
        return None
    return float(np.max(t[ok]))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def domain_to_dict(dom: RadialDomain) -> dict:
    if dom.dimension == 2:
        angles_or_directions = dom.grid.angles.tolist()
    else:
        angles_or_directions = dom.grid.directions.tolist()
    return {
        "dimension": dom.dimension,
        "center": dom.center.tolist(),
        "angles_or_directions": angles_or_directions,
        "radii": dom.radii.tolist(),
    }


def domain_from_dict(data: dict) -> RadialDomain:
    d = int(data["dimension"])
    aod = np.asarray(data["angles_or_directions"], dtype=float)
    if d == 2:
        if aod.ndim != 1:
            raise ValueError("d=2 expects a flat list of angles")
        dirs = np.column_stack([np.cos(aod), np.sin(aod)])
        grid = DirectionGrid(2, dirs, angles=aod)
    else:
        grid = DirectionGrid(d, aod.reshape(-1, d))
    return RadialDomain(np.asarray(data["center"], dtype=float), grid,
                        np.asarray(data["radii"], dtype=float))


def save_domain(dom: RadialDomain, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(domain_to_dict(dom), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_domain(path) -> RadialDomain:
    with open(path, "r", encoding="utf-8") as fh:
        return domain_from_dict(json.load(fh))


def boundary_samples_csv(dom: RadialDomain) -> str:
    """Boundary samples as CSV text: theta_index, x_1..x_d."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta_index"] + [f"x_{k + 1}" for k in range(dom.dimension)])
    for i, p in enumerate(boundary_points(dom)):
        writer.writerow([i] + [f"{v:.12g}" for v in p])
    return buf.getvalue()
