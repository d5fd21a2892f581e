"""Point-process sampling and Voronoi cell geometry.

Samples planar Poisson processes and triangular lattices inside a disk window
and measures oriented Voronoi cells: directional radii, polygons, areas, and
side counts for both the typical cell (a nucleus added at the origin, radii
oriented toward a uniformly random in-cell point) and the zero-cell (the cell
covering the origin, radii oriented toward the origin).

Exactness policy: the distance along direction u from a nucleus to the cell
boundary is min over neighbors y of |y|^2 / (2 y.u) for y.u > 0. A point
outside the window at distance > W from the origin contributes at least
(W - |nucleus|)/2, so any radius certified below that bound is exact for the
infinite process. Realizations violating the bound are discarded and
resampled; at the default window (12 per unit nearest-neighbor scale) the
discard rate is far below 1e-6.

All samplers are pure functions of (parameters, seed): replicates may run in
parallel on deterministically derived seed streams, and results are immutable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

log = logging.getLogger(__name__)

__all__ = [
    "CellSample",
    "ClippedCell",
    "PointBudgetError",
    "PointSet",
    "WindowTruncationError",
    "cell_polygon",
    "cell_radii_toward_origin",
    "cell_radius_toward",
    "default_angle_grid",
    "directional_radius",
    "polar_area",
    "sample_oned_typical_radii",
    "sample_ordered_radii",
    "sample_ppp",
    "sample_typical_cell",
    "sample_zero_cell",
    "triangular_lattice",
]

POINT_BUDGET = 10_000_000
DEFAULT_WINDOW_FACTOR = 12.0
MAX_RESAMPLE_ATTEMPTS = 1000

# Angles at which radii are always recorded exactly.
SPECIAL_ANGLES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)

_TWO_PI = 2.0 * math.pi


class WindowTruncationError(RuntimeError):
    """The simulation window cannot certify the requested geometry as exact."""


class PointBudgetError(RuntimeError):
    """The requested realization exceeds the configured point budget."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSet:
    """A finite planar point pattern with its generating window and intensity."""

    points: np.ndarray
    window_radius: float
    intensity: float

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if self.window_radius <= 0:
            raise ValueError("window_radius must be positive")
        if self.intensity <= 0:
            raise ValueError("intensity must be positive")
        norms = np.hypot(pts[:, 0], pts[:, 1])
        if norms.size and norms.max() > self.window_radius * (1 + 1e-9):
            raise ValueError("points must lie within the window disk")
        _reject_duplicates(pts, self.window_radius)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]


def _reject_duplicates(pts: np.ndarray, scale: float):
    """Reject coincident points (a probability-zero event; tol 1e-12 relative)."""
    if pts.shape[0] < 2:
        return
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    sp = pts[order]
    diff = np.abs(np.diff(sp, axis=0)).max(axis=1)
    if np.any(diff <= 1e-12 * scale):
        raise ValueError("coincident points detected; realization rejected")


@dataclass(frozen=True)
class CellSample:
    """One oriented cell observation.

    ``radii[i]`` is the boundary distance at ``angles[i]`` measured from the
    nucleus; angle 0 points toward the anchor (the uniformly random in-cell
    point for the typical cell, the origin for the zero-cell).
    ``anchor_distance`` is that point's distance from the nucleus.
    ``uniform_radius`` is an independent uniform-angle radius readout.
    """

    kind: str
    angles: np.ndarray
    radii: np.ndarray
    polygon: np.ndarray
    area: float
    side_count: int
    anchor_distance: float
    uniform_angle: float
    uniform_radius: float

    def __post_init__(self):
        if self.kind not in ("typical", "zero"):
            raise ValueError("kind must be 'typical' or 'zero'")
        if self.area <= 0 or self.side_count < 3 or self.anchor_distance < 0:
            raise ValueError("degenerate cell sample")
        for name in ("angles", "radii", "polygon"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    def radius_at(self, phi: float) -> float:
        """Radius at a recorded grid angle (exact match within 1e-12)."""
        idx = np.searchsorted(self.angles, phi)
        for j in (idx - 1, idx, idx + 1):
            if 0 <= j < self.angles.size and abs(self.angles[j] - phi) <= 1e-12:
                return float(self.radii[j])
        raise KeyError(f"angle {phi} is not on the recorded grid")


class ClippedCell(NamedTuple):
    """Result of half-plane clipping around a nucleus at the origin."""

    vertices: np.ndarray      # (m, 2), counterclockwise
    area: float
    side_count: int
    constraints: np.ndarray   # (k, 3) rows (ax, ay, b): half-plane ax*x+ay*y <= b


def default_angle_grid(n: int = 360) -> np.ndarray:
    """n equally spaced angles in [0, 2*pi) plus the exact special angles."""
    grid = np.arange(n) * (_TWO_PI / n)
    for phi in SPECIAL_ANGLES:
        idx = int(np.argmin(np.abs(grid - phi)))
        if abs(grid[idx] - phi) <= 1e-9:
            grid[idx] = phi
        else:
            grid = np.append(grid, phi)
    return np.sort(grid)


# ---------------------------------------------------------------------------
# point-pattern generators
# ---------------------------------------------------------------------------

def _check_budget(intensity: float, window_radius: float, budget: int):
    expected = intensity * math.pi * window_radius**2
    if expected > budget:
        raise PointBudgetError(
            f"expected point count {expected:.3g} exceeds budget {budget:.3g}"
        )


def _ppp_points(rng: np.random.Generator, intensity: float, window_radius: float) -> np.ndarray:
    """Poisson(intensity) points uniform in the disk of radius window_radius."""
    n = rng.poisson(intensity * math.pi * window_radius**2)
    radii = window_radius * np.sqrt(rng.random(n))
    theta = _TWO_PI * rng.random(n)
    out = np.empty((n, 2))
    np.multiply(radii, np.cos(theta), out=out[:, 0])
    np.multiply(radii, np.sin(theta), out=out[:, 1])
    return out


def sample_ppp(
    intensity: float,
    window_radius: float,
    seed=None,
    *,
    rng: np.random.Generator | None = None,
    budget: int = POINT_BUDGET,
) -> PointSet:
    """Sample a Poisson point process in a disk window centered at the origin."""
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    if window_radius <= 0:
        raise ValueError("window_radius must be positive")
    _check_budget(intensity, window_radius, budget)
    if rng is None:
        rng = np.random.default_rng(seed)
    return PointSet(_ppp_points(rng, intensity, window_radius), window_radius, intensity)


def lattice_spacing(intensity: float) -> float:
    """Nearest-neighbor spacing of a triangular lattice with the given density."""
    return math.sqrt(2.0 / (math.sqrt(3.0) * intensity))


def _lattice_points(rng: np.random.Generator, intensity: float, window_radius: float) -> np.ndarray:
    s = lattice_spacing(intensity)
    u1, u2 = rng.random(2)
    rot = _TWO_PI * rng.random()
    m = int(math.ceil(window_radius / s * 1.5)) + 2
    i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    i = (i + u1).ravel()
    j = (j + u2).ravel()
    x = s * (i + 0.5 * j)
    y = s * (math.sqrt(3.0) / 2.0) * j
    c, sn = math.cos(rot), math.sin(rot)
    xr = c * x - sn * y
    yr = sn * x + c * y
    keep = xr * xr + yr * yr <= window_radius * window_radius
    return np.column_stack((xr[keep], yr[keep]))


def triangular_lattice(
    intensity: float,
    window_radius: float,
    seed=None,
    *,
    rng: np.random.Generator | None = None,
) -> PointSet:
    """Triangular lattice of the given density, uniformly shifted and rotated.

    The random translation over one fundamental cell plus the random rotation
    make the origin a generic location, so the typical user's view of the
    lattice is stationary and isotropic.
    """
    if intensity <= 0 or window_radius <= 0:
        raise ValueError("intensity and window_radius must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    return PointSet(_lattice_points(rng, intensity, window_radius), window_radius, intensity)


# ---------------------------------------------------------------------------
# directional radius and polygon construction
# ---------------------------------------------------------------------------

def directional_radius(
    neighbors,
    direction,
    window_radius: float | None = None,
    nucleus_distance: float = 0.0,
) -> float:
    """Distance from a nucleus at the origin to its cell boundary along u.

    ``neighbors`` are the other points relative to the nucleus. The value is
    min over neighbors y with y.u > 0 of |y|^2 / (2 y.u): the location t*u
    belongs to the cell iff t <= |y|^2/(2 y.u) for every such y. When
    ``window_radius`` is given the exactness guard is enforced: the value must
    stay below (window_radius - nucleus_distance)/2, otherwise points outside
    the window could shrink it further.
    """
    pts = np.asarray(neighbors, dtype=float).reshape(-1, 2)
    u = np.asarray(direction, dtype=float)
    norm = math.hypot(u[0], u[1])
    if norm == 0:
        raise ValueError("direction must be a nonzero vector")
    u = u / norm
    proj = pts @ u
    mask = proj > 0
    if not np.any(mask):
        raise WindowTruncationError("no neighbor with positive projection: radius unbounded in window")
    num = np.einsum("ij,ij->i", pts, pts)
    if np.any(num[mask] == 0.0):
        raise ValueError("neighbor coincides with the nucleus")
    value = float(np.min(num[mask] / (2.0 * proj[mask])))
    if window_radius is not None:
        limit = 0.5 * (window_radius - nucleus_distance)
        if value >= limit:
            raise WindowTruncationError(
                f"radius {value:.4g} not certifiable within window (limit {limit:.4g})"
            )
    return value


def _clip_halfplane(xs: list, ys: list, ax: float, ay: float, b: float):
    """Clip the convex polygon by {t : ax*x + ay*y <= b}. Returns (xs, ys, cut)."""
    n = len(xs)
    s = [ax * xs[i] + ay * ys[i] - b for i in range(n)]
    if max(s) <= 0.0:
        return xs, ys, False
    nxs: list = []
    nys: list = []
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        si = s[i]
        sj = s[j]
        if si <= 0.0:
            nxs.append(xs[i])
            nys.append(ys[i])
            if sj > 0.0 and si < 0.0:
                t = si / (si - sj)
                nxs.append(xs[i] + t * (xs[j] - xs[i]))
                nys.append(ys[i] + t * (ys[j] - ys[i]))
        elif sj < 0.0:
            t = si / (si - sj)
            nxs.append(xs[i] + t * (xs[j] - xs[i]))
            nys.append(ys[i] + t * (ys[j] - ys[i]))
    return nxs, nys, True


def _dedupe_polygon(xs: list, ys: list, tol: float):
    nxs: list = []
    nys: list = []
    n = len(xs)
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        if abs(xs[i] - xs[j]) > tol or abs(ys[i] - ys[j]) > tol:
            nxs.append(xs[i])
            nys.append(ys[i])
    return nxs, nys


def cell_polygon(
    neighbors,
    window_radius: float,
    guard_radius: float | None = None,
    _check_sorted: bool = True,
) -> ClippedCell:
    """Voronoi cell of a nucleus at the origin by incremental half-plane clipping.

    ``neighbors`` must be sorted by distance from the nucleus. Clipping starts
    from the bounding square of half-width ``window_radius`` and terminates
    once the next neighbor's distance exceeds twice the current maximum vertex
    distance, since such a neighbor's bisector cannot cut the cell. If the
    final cell is not certified inside ``guard_radius`` (default half the
    window), a :class:`WindowTruncationError` is raised and the realization
    should be discarded upstream.
    """
    pts = np.asarray(neighbors, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise WindowTruncationError("no neighbors: cell unbounded in window")
    w = float(window_radius)
    if guard_radius is None:
        guard_radius = 0.5 * w
    d2 = np.einsum("ij,ij->i", pts, pts)
    if _check_sorted and np.any(np.diff(d2) < 0):
        raise ValueError("neighbors must be sorted by distance from the nucleus")
    if d2[0] == 0.0:
        raise ValueError("neighbor coincides with the nucleus")

    xs = [-w, w, w, -w]
    ys = [-w, -w, w, w]
    rho2 = 2.0 * w * w
    px = pts[:, 0].tolist()
    py = pts[:, 1].tolist()
    dd = d2.tolist()
    constraints: list = []
    for i in range(len(dd)):
        d2i = dd[i]
        if d2i >= 4.0 * rho2:
            break
        ax = px[i]
        ay = py[i]
        b = 0.5 * d2i
        xs, ys, cut = _clip_halfplane(xs, ys, ax, ay, b)
        if cut:
            constraints.append((ax, ay, b))
            rho2 = max(x * x + y * y for x, y in zip(xs, ys))

    rho = math.sqrt(rho2)
    if rho >= guard_radius:
        raise WindowTruncationError(
            f"cell extends to {rho:.4g}, beyond the certified radius {guard_radius:.4g}"
        )
    xs, ys = _dedupe_polygon(xs, ys, 1e-12 * max(1.0, rho))
    area = 0.0
    n = len(xs)
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        area += xs[i] * ys[j] - xs[j] * ys[i]
    area *= 0.5
    vertices = np.column_stack((xs, ys))
    return ClippedCell(vertices, area, n, np.asarray(constraints, dtype=float))


def _radii_from_constraints(constraints: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Boundary distances at the given angles for a clipped cell."""
    u = np.empty((2, angles.size))
    np.cos(angles, out=u[0])
    np.sin(angles, out=u[1])
    den = constraints[:, :2] @ u
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den > 0, constraints[:, 2:3] / den, np.inf)
    return vals.min(axis=0)


def polar_area(angles: np.ndarray, radii: np.ndarray) -> float:
    """Trapezoid quadrature of (1/2) integral of R^2 over the full circle."""
    a = np.append(angles, angles[0] + _TWO_PI)
    r2 = np.append(radii**2, radii[0] ** 2)
    return 0.5 * float(np.trapezoid(r2, a))


def _rotate(points: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    x, y = points[..., 0], points[..., 1]
    return np.stack((c * x - s * y, s * x + c * y), axis=-1)


# ---------------------------------------------------------------------------
# cell samplers
# ---------------------------------------------------------------------------

def _uniform_point_in_fan(rng: np.random.Generator, xs: np.ndarray, ys: np.ndarray):
    """Uniform point in a convex polygon containing the origin.

    Area-weighted choice among the origin-fan triangles, then uniform
    barycentric sampling inside the chosen triangle; exact and rejection-free.
    """
    n = len(xs)
    weights = np.empty(n)
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        weights[i] = xs[i] * ys[j] - xs[j] * ys[i]
    cum = np.cumsum(weights)
    pick = rng.random() * cum[-1]
    k = int(np.searchsorted(cum, pick))
    k = min(k, n - 1)
    j = k + 1 if k + 1 < n else 0
    u, v = rng.random(2)
    if u + v > 1.0:
        u, v = 1.0 - u, 1.0 - v
    return u * xs[k] + v * xs[j], u * ys[k] + v * ys[j]


def _sample_cell(
    kind: str,
    intensity: float,
    rng: np.random.Generator,
    angles: np.ndarray,
    window_radius: float,
    counters: dict | None,
) -> CellSample:
    w = window_radius
    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        pts = _ppp_points(rng, intensity, w)
        if pts.shape[0] < 3:
            _count(counters, "discard_truncation")
            continue
        d2 = np.einsum("ij,ij->i", pts, pts)
        if kind == "zero":
            i0 = int(np.argmin(d2))
            nucleus = pts[i0]
            anchor = math.sqrt(d2[i0])
            rel = np.delete(pts, i0, axis=0) - nucleus
            guard = 0.5 * (w - anchor)
            # frame rotation mapping the origin's direction to angle 0
            frame = math.pi - math.atan2(nucleus[1], nucleus[0])
        else:
            rel = pts
            guard = 0.5 * w
            frame = None  # fixed after the in-cell point is drawn

        nd2 = np.einsum("ij,ij->i", rel, rel)
        order = np.argsort(nd2)
        sorted_rel = rel[order]
        nd2s = nd2[order]
        if nd2s[0] <= (1e-12 * w) ** 2 or _has_tied_duplicate(sorted_rel, nd2s, w):
            _count(counters, "discard_duplicate")
            continue
        try:
            cell = cell_polygon(sorted_rel, w, guard_radius=guard, _check_sorted=False)
        except WindowTruncationError:
            _count(counters, "discard_truncation")
            continue

        if kind == "typical":
            zx, zy = _uniform_point_in_fan(rng, cell.vertices[:, 0], cell.vertices[:, 1])
            anchor = math.hypot(zx, zy)
            frame = -math.atan2(zy, zx)

        # Radii in the rotated frame: R_rot(phi) = R_orig(phi - frame);
        # the uniform-angle readout shares the single constraint query.
        theta = _TWO_PI * rng.random()
        query = np.append(angles, theta) - frame
        vals = _radii_from_constraints(cell.constraints, query)
        return CellSample(
            kind=kind,
            angles=np.array(angles),
            radii=vals[:-1],
            polygon=_rotate(cell.vertices, frame),
            area=cell.area,
            side_count=cell.side_count,
            anchor_distance=anchor,
            uniform_angle=theta,
            uniform_radius=float(vals[-1]),
        )
    raise WindowTruncationError(
        f"failed to draw an exact cell in {MAX_RESAMPLE_ATTEMPTS} attempts; enlarge the window"
    )


def _has_tied_duplicate(sorted_rel: np.ndarray, sorted_d2: np.ndarray, scale: float) -> bool:
    """Duplicate detection on the sorted neighbor list (ties then coordinates)."""
    close = np.flatnonzero(np.diff(sorted_d2) <= 4e-12 * scale * scale)
    for i in close:
        if np.all(np.abs(sorted_rel[i] - sorted_rel[i + 1]) <= 1e-12 * scale):
            return True
    return False


def _count(counters: dict | None, key: str):
    if counters is not None:
        counters[key] = counters.get(key, 0) + 1
    log.debug("cell sampler event: %s", key)


def sample_typical_cell(
    intensity: float,
    seed=None,
    *,
    angles: np.ndarray | None = None,
    window_radius: float | None = None,
    rng: np.random.Generator | None = None,
    counters: dict | None = None,
) -> CellSample:
    """Sample the typical Voronoi cell under Palm conditioning.

    A nucleus is placed at the origin of a fresh Poisson realization, its cell
    is built, a point z is drawn uniformly in the cell, and the frame is
    rotated so z lies on the positive x-axis. ``anchor_distance`` is |z| and
    radii are recorded on the angle grid (default: 360 angles plus the exact
    quarter-turn angles).
    """
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    if angles is None:
        angles = default_angle_grid()
    w = window_radius if window_radius is not None else DEFAULT_WINDOW_FACTOR / math.sqrt(intensity)
    _check_budget(intensity, w, POINT_BUDGET)
    return _sample_cell("typical", intensity, rng, np.asarray(angles, dtype=float), w, counters)


def sample_zero_cell(
    intensity: float,
    seed=None,
    *,
    angles: np.ndarray | None = None,
    window_radius: float | None = None,
    rng: np.random.Generator | None = None,
    counters: dict | None = None,
) -> CellSample:
    """Sample the zero-cell: the Voronoi cell that covers the origin.

    The nearest point to the origin is the nucleus; coordinates are shifted to
    put it at the origin and rotated so the displaced origin sits at
    (anchor_distance, 0). Radii at angle 0 therefore point toward the typical
    user and satisfy radius >= anchor_distance.
    """
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    if angles is None:
        angles = default_angle_grid()
    w = window_radius if window_radius is not None else DEFAULT_WINDOW_FACTOR / math.sqrt(intensity)
    _check_budget(intensity, w, POINT_BUDGET)
    return _sample_cell("zero", intensity, rng, np.asarray(angles, dtype=float), w, counters)


# ---------------------------------------------------------------------------
# radii of cells toward a target
# ---------------------------------------------------------------------------

def cell_radius_toward(points: PointSet, bs, target) -> float:
    """Distance from a point of the pattern to its cell edge toward a target."""
    pts = points.points
    bs = np.asarray(bs, dtype=float)
    target = np.asarray(target, dtype=float)
    dists = np.hypot(pts[:, 0] - bs[0], pts[:, 1] - bs[1])
    idx = int(np.argmin(dists))
    if dists[idx] > 1e-12 * points.window_radius:
        raise ValueError("bs must be a point of the pattern")
    tdist = np.hypot(pts[:, 0] - target[0], pts[:, 1] - target[1])
    if tdist.min() <= 1e-12 * points.window_radius:
        raise ValueError("target must not be a point of the pattern")
    rel = np.delete(pts, idx, axis=0) - bs
    u = target - bs
    return directional_radius(
        rel, u, window_radius=points.window_radius, nucleus_distance=float(np.hypot(*bs))
    )


def _radii_matrix(pts: np.ndarray, q: np.ndarray, row_block: int = 512) -> np.ndarray:
    """Radii toward the origin for query indices q, dense bisector scan."""
    d = np.hypot(pts[:, 0], pts[:, 1])
    if np.any(d[q] == 0):
        raise ValueError("cell radius toward the origin undefined for a point at the origin")
    d2 = d * d
    out = np.empty(q.size)
    for s in range(0, q.size, row_block):
        qi = q[s : s + row_block]
        g = pts[qi] @ pts.T                       # (m, n) inner products
        dq = d[qi][:, None]
        den = 2.0 * (dq - g / dq)                 # 2 (p_j - x_i) . u_i
        num = d2[qi][:, None] + d2[None, :] - 2.0 * g
        num[np.arange(qi.size), qi] = np.inf      # exclude the nucleus itself
        if np.any(num <= 0):
            raise ValueError("coincident points detected; realization rejected")
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(den > 0, num / den, np.inf)
        out[s : s + row_block] = vals.min(axis=1)
    return out


def _radii_kdtree(pts: np.ndarray, q: np.ndarray, block: int = 131072) -> np.ndarray:
    """Radii toward the origin via k-nearest-neighbor passes.

    A value r computed from the k nearest neighbors is exact once
    2r <= (distance to the k-th neighbor): farther points contribute at least
    half their distance. Uncertified rows escalate k.
    """
    tree = cKDTree(pts, balanced_tree=False, compact_nodes=False)
    n = pts.shape[0]
    d = np.hypot(pts[:, 0], pts[:, 1])
    if np.any(d[q] == 0):
        raise ValueError("cell radius toward the origin undefined for a point at the origin")
    out = np.empty(q.size)
    for s in range(0, q.size, block):
        qb = q[s : s + block]
        pending = np.arange(qb.size)
        k = 13
        while pending.size:
            kk = min(k, n)
            idx = qb[pending]
            workers = -1 if idx.size > 32768 else 1
            dd, jj = tree.query(pts[idx], k=kk, workers=workers)
            if kk == 1:
                dd = dd[:, None]
                jj = jj[:, None]
            if np.any(dd[:, 1] == 0.0):
                raise ValueError("coincident points detected; realization rejected")
            rel = pts[jj] - pts[idx][:, None, :]
            u = -pts[idx] / d[idx][:, None]
            den = 2.0 * np.einsum("mkj,mj->mk", rel, u)
            num = dd * dd
            num[:, 0] = np.inf                    # self
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.where(den > 0, num / den, np.inf)
            r = vals.min(axis=1)
            certified = (2.0 * r <= dd[:, -1]) if kk < n else np.ones(r.size, bool)
            out[s + pending[certified]] = r[certified]
            pending = pending[~certified]
            k *= 4
    return out


def cell_radii_toward_origin(
    points,
    query_idx=None,
    window_radius: float | None = None,
) -> np.ndarray:
    """Cell radius toward the origin for many points of one pattern at once.

    Dense bisector scan for small patterns, k-nearest-neighbor passes beyond
    1e5 pairwise entries. When ``window_radius`` is given, every returned
    radius is checked against the exactness guard (window - |x|)/2 and a
    violation raises :class:`WindowTruncationError` so the caller can resample.
    """
    pts = points.points if isinstance(points, PointSet) else np.asarray(points, dtype=float)
    if window_radius is None and isinstance(points, PointSet):
        window_radius = points.window_radius
    n = pts.shape[0]
    q = np.arange(n) if query_idx is None else np.asarray(query_idx, dtype=int)
    if n < 2:
        raise WindowTruncationError("need at least 2 points for a bounded cell radius")
    if q.size * n <= 20_000:
        r = _radii_matrix(pts, q)
    else:
        r = _radii_kdtree(pts, q)
    if window_radius is not None:
        d = np.hypot(pts[q, 0], pts[q, 1])
        bad = r >= 0.5 * (window_radius - d)
        if np.any(bad):
            raise WindowTruncationError(
                f"{int(bad.sum())} cell radii not certifiable within the window"
            )
    return r


# ---------------------------------------------------------------------------
# vectorized radius-only samplers
# ---------------------------------------------------------------------------

def sample_ordered_radii(
    intensity: float,
    indices: Sequence[int],
    n: int,
    seed=None,
    *,
    window_radius: float | None = None,
    rng: np.random.Generator | None = None,
    chunk: int = 256,
):
    """Distances and origin-oriented cell radii of distance-ordered points.

    For each requested order index i (0 = nearest point to the origin),
    returns arrays (distance, radius) over ``n`` independent Poisson
    realizations. Realizations violating the exactness guard for any
    requested index are discarded and resampled (count returned).
    """
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    indices = sorted(set(int(i) for i in indices))
    if not indices or indices[0] < 0:
        raise ValueError("indices must be non-negative integers")
    if rng is None:
        rng = np.random.default_rng(seed)
    w = window_radius if window_radius is not None else DEFAULT_WINDOW_FACTOR / math.sqrt(intensity)
    _check_budget(intensity, w, POINT_BUDGET)
    mu = intensity * math.pi * w * w
    kmax = indices[-1]
    got = 0
    discards = 0
    dist_out = {i: np.empty(n) for i in indices}
    rad_out = {i: np.empty(n) for i in indices}
    while got < n:
        b = min(chunk, max(n - got, 32))
        counts = rng.poisson(mu, b)
        kcap = int(counts.max())
        rads = w * np.sqrt(rng.random((b, kcap)))
        angs = _TWO_PI * rng.random((b, kcap))
        x = rads * np.cos(angs)
        y = rads * np.sin(angs)
        valid = np.arange(kcap)[None, :] < counts[:, None]
        d2 = np.where(valid, x * x + y * y, np.inf)
        ok = counts > kmax
        ok_in = ok.copy()
        order = np.argsort(d2, axis=1)
        rows = np.arange(b)
        res_d = {}
        res_r = {}
        for i in indices:
            sel = order[:, i]
            xi = x[rows, sel]
            yi = y[rows, sel]
            di = np.sqrt(d2[rows, sel])
            dx = x - xi[:, None]
            dy = y - yi[:, None]
            num = dx * dx + dy * dy
            den = -2.0 * (dx * xi[:, None] + dy * yi[:, None]) / di[:, None]
            num[rows, sel] = np.inf
            ok &= ~np.any(valid & (num == 0.0), axis=1)
            bad = ~valid | (den <= 0)
            num = np.where(bad, np.inf, num)
            with np.errstate(divide="ignore", invalid="ignore"):
                ri = np.where(bad, np.inf, num / np.where(bad, 1.0, den)).min(axis=1)
            ok &= ri < 0.5 * (w - di)
            res_d[i] = di
            res_r[i] = ri
        discards += int(np.sum(ok_in & ~ok))
        take = min(int(ok.sum()), n - got)
        keep = np.flatnonzero(ok)[:take]
        for i in indices:
            dist_out[i][got : got + take] = res_d[i][keep]
            rad_out[i][got : got + take] = res_r[i][keep]
        got += take
    return {i: (dist_out[i], rad_out[i]) for i in indices}, discards


def sample_oned_typical_radii(intensity: float, n: int, seed=None, *, rng=None):
    """Directional radii (toward/away from a uniform in-cell point) in 1-d.

    The typical cell of a linear Poisson process is [-L/2, R/2] with L, R
    independent exponential gaps; a point z uniform in the cell orients the
    cell. Returns (forward radii, backward radii).
    """
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    right = rng.exponential(1.0 / intensity, n) / 2.0
    left = rng.exponential(1.0 / intensity, n) / 2.0
    z = rng.uniform(-left, right)
    r0 = np.where(z >= 0, right, left)
    rpi = np.where(z >= 0, left, right)
    return r0, rpi
