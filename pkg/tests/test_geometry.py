import math

import numpy as np
import pytest

from voronet import analytic as a
from voronet import geometry as g
from voronet.stats import EmpiricalDistribution, correlation


# ---------------------------------------------------------------------------
# point-process generators
# ---------------------------------------------------------------------------

def test_ppp_count_mean_and_determinism():
    ps = g.sample_ppp(1.0, 10.0, seed=7)
    ps2 = g.sample_ppp(1.0, 10.0, seed=7)
    assert np.array_equal(ps.points, ps2.points)
    assert abs(len(ps) - 100 * math.pi) < 5 * math.sqrt(100 * math.pi)


def test_ppp_parameter_and_budget_errors():
    with pytest.raises(ValueError):
        g.sample_ppp(0.0, 10.0, seed=1)
    with pytest.raises(ValueError):
        g.sample_ppp(1.0, -1.0, seed=1)
    with pytest.raises(g.PointBudgetError):
        g.sample_ppp(1.0, 10_000.0, seed=1)


def test_ppp_count_concentration():
    # mean count over replicates within 3 sigma of lam*pi*W^2
    rng = np.random.default_rng(11)
    n = 10_000
    counts = [g._ppp_points(rng, 1.0, 20.0).shape[0] for _ in range(n)]
    mu = 400 * math.pi
    assert abs(np.mean(counts) - mu) < 3 * math.sqrt(mu / n)


def test_pointset_validation():
    with pytest.raises(ValueError):
        g.PointSet(np.array([[0.0, 0.0], [3.0, 0.0]]), window_radius=2.0, intensity=1.0)
    with pytest.raises(ValueError):
        g.PointSet(np.array([[1.0, 1.0], [1.0, 1.0]]), window_radius=2.0, intensity=1.0)


def test_lattice_spacing_density_and_randomization():
    assert g.lattice_spacing(1.0) == pytest.approx(math.sqrt(2 / math.sqrt(3)))
    ps = g.triangular_lattice(1.0, 60.0, seed=3)
    density = len(ps) / (math.pi * 60.0**2)
    assert density == pytest.approx(1.0, abs=0.01)
    # two seeds: different offsets, same spacing
    p1 = g.triangular_lattice(1.0, 20.0, seed=1).points
    p2 = g.triangular_lattice(1.0, 20.0, seed=2).points
    assert not np.allclose(p1[:5], p2[:5])

    def nn_spacing(pts):
        d2 = np.sum((pts[None, :, :] - pts[:, None, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        return np.sqrt(d2.min())

    s = g.lattice_spacing(1.0)
    assert nn_spacing(p1[:200]) == pytest.approx(s, rel=1e-9)
    assert nn_spacing(p2[:200]) == pytest.approx(s, rel=1e-9)


# ---------------------------------------------------------------------------
# directional radius and polygon construction
# ---------------------------------------------------------------------------

def test_directional_radius_examples():
    assert g.directional_radius(np.array([[2.0, 0.0]]), (1, 0)) == pytest.approx(1.0)
    val = g.directional_radius(np.array([[2.0, 0.0], [0.0, 2.0]]), (1, 1))
    assert val == pytest.approx(math.sqrt(2.0))
    with pytest.raises(g.WindowTruncationError):
        g.directional_radius(np.array([[2.0, 0.0]]), (0, 1))


def test_directional_radius_guard():
    # value above half the window is not certifiable
    with pytest.raises(g.WindowTruncationError):
        g.directional_radius(np.array([[3.0, 0.0]]), (1, 0), window_radius=2.9)
    assert g.directional_radius(np.array([[3.0, 0.0]]), (1, 0), window_radius=3.1) == pytest.approx(1.5)


def test_cell_polygon_hexagon_oracle():
    ang = np.arange(6) * math.pi / 3
    nb = 2.0 * np.column_stack((np.cos(ang), np.sin(ang)))
    order = np.argsort(np.einsum("ij,ij->i", nb, nb), kind="stable")
    cell = g.cell_polygon(nb[order], window_radius=10.0)
    assert cell.side_count == 6
    assert cell.area == pytest.approx(2 * math.sqrt(3), rel=1e-12)


def test_cell_polygon_square_and_truncation():
    nb = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    cell = g.cell_polygon(nb, window_radius=10.0)
    assert cell.side_count == 4
    assert cell.area == pytest.approx(4.0, rel=1e-12)
    assert np.max(np.abs(cell.vertices)) == pytest.approx(1.0)
    with pytest.raises(g.WindowTruncationError):
        g.cell_polygon(np.array([[2.0, 0.0]]), window_radius=3.0)


def test_cell_polygon_requires_sorted():
    nb = np.array([[4.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        g.cell_polygon(nb, window_radius=10.0)


def _brute_force_radius(points, nucleus, direction, t_hi=6.0, steps=200_000):
    """Independent oracle: scan along the ray for the point-in-cell boundary."""
    u = np.asarray(direction, float)
    u = u / np.hypot(*u)
    ts = np.linspace(1e-9, t_hi, steps)
    locs = nucleus[None, :] + ts[:, None] * u[None, :]
    d_nuc = np.sum((locs - nucleus[None, :]) ** 2, axis=1)
    others = points[~np.all(points == nucleus, axis=1)]
    d_min = np.min(
        np.sum((locs[:, None, :] - others[None, :, :]) ** 2, axis=-1), axis=1
    )
    inside = d_nuc <= d_min
    return ts[np.argmin(inside)] if not inside.all() else np.inf


def test_cell_radius_toward_matches_brute_force():
    pts = np.array([[0.3, 0.1], [1.4, -0.2], [0.9, 1.2], [-0.8, 0.7], [0.1, -1.3]])
    ps = g.PointSet(pts, window_radius=6.0, intensity=1.0)
    target = np.array([0.0, 0.0])
    for i in range(len(pts)):
        val = g.cell_radius_toward(ps, pts[i], target)
        ref = _brute_force_radius(pts, pts[i], target - pts[i])
        assert val == pytest.approx(ref, abs=1e-4)


def test_cell_radius_toward_contract():
    pts = np.array([[0.3, 0.1], [1.4, -0.2], [0.9, 1.2]])
    ps = g.PointSet(pts, window_radius=6.0, intensity=1.0)
    with pytest.raises(ValueError):
        g.cell_radius_toward(ps, np.array([5.0, 5.0]), np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        g.cell_radius_toward(ps, pts[0], pts[1])
    # the serving cell always covers the origin: radius >= distance
    rng = np.random.default_rng(0)
    for seed in range(20):
        ps = g.sample_ppp(1.0, 12.0, seed=seed)
        i0 = int(np.argmin(np.einsum("ij,ij->i", ps.points, ps.points)))
        bs = ps.points[i0]
        assert g.cell_radius_toward(ps, bs, np.array([0.0, 0.0])) >= np.hypot(*bs)


def test_cell_radii_toward_origin_kdtree_matches_matrix():
    rng = np.random.default_rng(5)
    pts = g._ppp_points(rng, 1.0, 16.0)
    d = np.hypot(pts[:, 0], pts[:, 1])
    q = np.flatnonzero((d <= 10.0) & (d > 0))
    r_mat = g._radii_matrix(pts, q)
    r_kd = g._radii_kdtree(pts, q)
    # the dense path expands |p_j - p_i|^2, losing ~4 digits for close pairs
    assert np.allclose(r_mat, r_kd, rtol=1e-9, atol=0)


# ---------------------------------------------------------------------------
# cell samplers
# ---------------------------------------------------------------------------

ANGLES5 = np.asarray(g.SPECIAL_ANGLES)


def _collect(kind, n, seed, angles=ANGLES5, lam=1.0):
    rng = np.random.default_rng(seed)
    sampler = g.sample_typical_cell if kind == "typical" else g.sample_zero_cell
    return [sampler(lam, rng=rng, angles=angles) for _ in range(n)]


def test_typical_cell_sample_invariants():
    for c in _collect("typical", 200, 0):
        assert c.kind == "typical"
        assert c.radius_at(0.0) >= c.anchor_distance - 1e-12
        # shoelace area of the stored polygon equals the recorded area
        v = c.polygon
        x, y = v[:, 0], v[:, 1]
        shoelace = 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        assert shoelace == pytest.approx(c.area, rel=1e-9)
        assert c.side_count == len(v)


def test_zero_cell_sample_invariants():
    for c in _collect("zero", 200, 1):
        assert c.kind == "zero"
        assert c.radius_at(0.0) >= c.anchor_distance - 1e-12
        assert c.radius_at(math.pi) > 0


def test_typical_cell_moments_moderate_n():
    cells = _collect("typical", 20_000, 2)
    area = np.array([c.area for c in cells])
    sides = np.array([c.side_count for c in cells])
    rbar = np.array([c.uniform_radius for c in cells])
    assert abs(area.mean() - 1.0) < 4 * area.std() / math.sqrt(area.size)
    assert abs(sides.mean() - 6.0) < 4 * sides.std() / math.sqrt(sides.size)
    assert abs(rbar.mean() - 0.5) < 4 * rbar.std() / math.sqrt(rbar.size)


def test_zero_cell_moments_moderate_n():
    cells = _collect("zero", 20_000, 3)
    r0 = np.array([c.radius_at(0.0) for c in cells])
    rpi = np.array([c.radius_at(math.pi) for c in cells])
    d0 = np.array([c.anchor_distance for c in cells])
    for arr, target in ((r0, 0.75), (rpi, 0.5), (d0, 0.5)):
        assert abs(arr.mean() - target) < 4 * arr.std() / math.sqrt(arr.size)


def test_sampler_determinism():
    c1 = g.sample_typical_cell(1.0, seed=42, angles=ANGLES5)
    c2 = g.sample_typical_cell(1.0, seed=42, angles=ANGLES5)
    assert np.array_equal(c1.radii, c2.radii)
    assert c1.area == c2.area and c1.anchor_distance == c2.anchor_distance


def test_scale_equivariance_matched_seeds():
    # intensity lam -> lam*c^2 with window scaled by 1/c: identical draws scale by 1/c
    for kind in ("typical", "zero"):
        sampler = g.sample_typical_cell if kind == "typical" else g.sample_zero_cell
        c1 = sampler(1.0, seed=9, angles=ANGLES5, window_radius=12.0)
        c4 = sampler(4.0, seed=9, angles=ANGLES5, window_radius=6.0)
        assert np.allclose(c1.radii, 2.0 * c4.radii, rtol=1e-12)
        assert c1.area == pytest.approx(4.0 * c4.area, rel=1e-12)
        assert c1.anchor_distance == pytest.approx(2.0 * c4.anchor_distance, rel=1e-12)
        assert c1.side_count == c4.side_count


def test_angle_symmetry_of_mean_radius():
    # E R(phi) should match E R(2*pi - phi) within Monte Carlo error
    angles = np.array([math.pi / 3, 2 * math.pi - math.pi / 3])
    rng = np.random.default_rng(12)
    vals = np.array([g.sample_typical_cell(1.0, rng=rng, angles=angles).radii for _ in range(20_000)])
    diff = vals[:, 0] - vals[:, 1]
    assert abs(diff.mean()) < 4 * diff.std() / math.sqrt(diff.size)


def test_area_identity_polar_quadrature():
    # polygon area equals the trapezoid quadrature of R^2/2 on the dense grid within 1%
    rng = np.random.default_rng(4)
    grid = g.default_angle_grid()
    for _ in range(40):
        c = g.sample_typical_cell(1.0, rng=rng, angles=grid)
        quad = g.polar_area(c.angles, c.radii)
        assert quad == pytest.approx(c.area, rel=0.01)


def test_default_angle_grid_contains_specials():
    grid = g.default_angle_grid()
    assert grid.size >= 360
    for phi in g.SPECIAL_ANGLES:
        assert np.any(grid == phi)


def test_ratio_law_moderate_n():
    cells = _collect("zero", 20_000, 5)
    ratio = np.array([c.anchor_distance / c.radius_at(0.0) for c in cells])
    ks = EmpiricalDistribution(ratio).ks_distance(lambda t: np.clip(t, 0, 1) ** 2)
    assert ks < 1.95 / math.sqrt(ratio.size)


def test_independence_of_anchor_and_backward_radius():
    cells = _collect("zero", 30_000, 6)
    d0 = np.array([c.anchor_distance for c in cells])
    rpi = np.array([c.radius_at(math.pi) for c in cells])
    est = correlation(d0, rpi)
    assert abs(est.value) < 4 * est.se
    # identical marginals: two-sample KS below the large-sample 99.9% bound
    n = d0.size
    s1, s2 = np.sort(d0), np.sort(rpi)
    grid = np.concatenate([s1, s2])
    e1 = np.searchsorted(s1, grid, side="right") / n
    e2 = np.searchsorted(s2, grid, side="right") / n
    ks2 = np.max(np.abs(e1 - e2))
    assert ks2 < 1.95 * math.sqrt(2.0 / n)


def test_ordered_radii_sampler_law():
    data, discards = g.sample_ordered_radii(1.0, (1, 2), 20_000, seed=8, window_radius=8.0)
    assert discards == 0
    for i in (1, 2):
        d, r = data[i]
        assert np.all(r <= d + 1e-12)
        ks = EmpiricalDistribution(r / d).ks_distance(lambda t: a.ratio_law_cdf(i, np.clip(t, 0, 1)))
        assert ks < 1.95 / math.sqrt(d.size)
    # ccdf of the radius itself: exp(-pi t^2) at t = 0.6
    d1, r1 = data[1]
    emp = np.mean(r1 > 0.6)
    assert abs(emp - math.exp(-math.pi * 0.36)) < 4 * math.sqrt(emp * (1 - emp) / r1.size)


def test_oned_sampler_against_cdf():
    r0, rpi = g.sample_oned_typical_radii(1.0, 100_000, seed=9)
    ks = EmpiricalDistribution(rpi).ks_distance(lambda t: a.oned_r_pi_cdf(t, 1.0))
    assert ks < 1.95 / math.sqrt(rpi.size)
    assert abs(r0.mean() + rpi.mean() - 1.0) < 0.01


def test_discard_counters_exposed():
    counters: dict = {}
    g.sample_typical_cell(1.0, seed=0, angles=ANGLES5, counters=counters)
    assert counters.get("discard_truncation", 0) >= 0
