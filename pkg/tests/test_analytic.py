import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate, stats

from voronet import analytic as a


# ---------------------------------------------------------------------------
# lens area
# ---------------------------------------------------------------------------

def lens_oracle(phi, x, y):
    """Generic two-circle intersection area; independent of the closed form."""
    d = math.hypot(x - y * math.cos(phi), y * math.sin(phi))
    r, big = min(x, y), max(x, y)
    if d >= r + big:
        return 0.0
    if d <= big - r:
        return math.pi * r * r
    a1 = r * r * math.acos((d * d + r * r - big * big) / (2 * d * r))
    a2 = big * big * math.acos((d * d + big * big - r * r) / (2 * d * big))
    a3 = 0.5 * math.sqrt((-d + r + big) * (d + r - big) * (d - r + big) * (d + r + big))
    return a1 + a2 - a3


def test_lens_area_examples():
    for x, y in [(0.5, 1.0), (2.0, 3.0), (1.0, 1.0)]:
        assert a.lens_area(math.pi, x, y) == pytest.approx(0.0, abs=1e-12)
    assert a.lens_area(0.0, 1.0, 2.0) == pytest.approx(math.pi)
    assert a.lens_area(math.pi / 2, 1.0, 1.0) == pytest.approx(math.pi / 2 - 1.0)


def test_lens_area_matches_circle_oracle():
    rng = np.random.default_rng(0)
    for _ in range(500):
        phi = rng.uniform(0, math.pi)
        x, y = rng.uniform(0, 3, 2)
        assert a.lens_area(phi, x, y) == pytest.approx(lens_oracle(phi, x, y), abs=1e-10)


def test_lens_area_domain_errors():
    with pytest.raises(ValueError):
        a.lens_area(-0.1, 1, 1)
    with pytest.raises(ValueError):
        a.lens_area(3.5, 1, 1)
    with pytest.raises(ValueError):
        a.lens_area(1.0, -1, 1)


def test_lens_area_dy_matches_finite_difference():
    rng = np.random.default_rng(1)
    h = 1e-6
    for _ in range(200):
        phi = rng.uniform(1e-3, math.pi - 1e-3)
        x, y = rng.uniform(0.1, 3, 2)
        fd = (a.lens_area(phi, x, y + h) - a.lens_area(phi, x, y - h)) / (2 * h)
        assert a.lens_area_dy(phi, x, y) == pytest.approx(fd, rel=1e-5, abs=1e-6)


# ---------------------------------------------------------------------------
# zero-cell laws
# ---------------------------------------------------------------------------

def test_joint_pdf_angle_zero_reduction():
    lam = 1.3
    for x, y in [(0.2, 0.5), (0.7, 0.9), (0.1, 1.4)]:
        expect = (2 * lam * math.pi) ** 2 * x * y * math.exp(-lam * math.pi * y * y)
        assert float(a.zero_cell_joint_pdf(0.0, x, y, lam)) == pytest.approx(expect, rel=1e-12)


def test_joint_pdf_angle_pi_product_form():
    lam = 0.8
    for x, y in [(0.2, 0.5), (1.1, 0.4)]:
        expect = a.corollary1_pdfs("r0_pi", x, lam) * a.corollary1_pdfs("r0_pi", y, lam)
        assert float(a.zero_cell_joint_pdf(math.pi, x, y, lam)) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("phi", [0.0, math.pi / 4, math.pi / 2, math.pi])
def test_joint_pdf_normalization(phi):
    def inner(x):
        lo = x if phi == 0.0 else 0.0
        val, _ = integrate.quad(
            lambda y: float(a.zero_cell_joint_pdf(phi, x, y, 1.0)),
            lo, 8.0, epsabs=1e-11, epsrel=1e-9, limit=300,
        )
        return val

    total, _ = integrate.quad(inner, 0.0, 6.0, epsabs=1e-10, epsrel=1e-8, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_conditional_ccdf_consistency_with_joint():
    # d/dy of the conditional ccdf must match the conditional pdf (1e-6 rel).
    h = 1e-5
    for phi in (0.4, math.pi / 2, 2.8):
        for x in (0.3, 0.9):
            for y in (0.5, 1.2):
                fd = -(
                    a.zero_cell_conditional_ccdf(phi, x, y + h)
                    - a.zero_cell_conditional_ccdf(phi, x, y - h)
                ) / (2 * h)
                cond_pdf = float(a.zero_cell_joint_pdf(phi, x, y)) / (
                    2 * math.pi * x * math.exp(-math.pi * x * x)
                )
                assert fd == pytest.approx(cond_pdf, rel=1e-6)


def test_corollary1_values():
    assert a.corollary1_pdfs("r0_0", 1.0, 1.0) == pytest.approx(2 * math.pi**2 * math.exp(-math.pi))
    assert a.corollary1_pdfs("gap", 0.0, 1.0) == pytest.approx(math.pi)
    mean_rpi, _ = integrate.quad(lambda y: y * a.corollary1_pdfs("r0_pi", y, 4.0), 0, 10)
    assert mean_rpi == pytest.approx(1 / (2 * math.sqrt(4.0)), abs=1e-9)
    assert a.gap_correlation_constant() == pytest.approx(-0.3462, abs=5e-5)


def test_corollary1_cdfs_match_pdf_integrals():
    for which in ("r0_0", "r0_pi", "gap"):
        for y in (0.3, 0.8, 1.5):
            val, _ = integrate.quad(lambda t: a.corollary1_pdfs(which, t, 1.0), 0, y, limit=200)
            assert a.corollary1_cdfs(which, y, 1.0) == pytest.approx(val, abs=1e-9)


def test_vertex_gamma_identity():
    # cdf of pi*R0(0)^2 equals the Gamma(2, lam) cdf pointwise
    lam = 1.7
    y = np.linspace(0.01, 3.0, 50)
    lhs = a.corollary1_cdfs("r0_0", y, lam)
    rhs = stats.gamma(a=2, scale=1 / lam).cdf(math.pi * y**2)
    assert np.max(np.abs(lhs - rhs)) < 1e-10
    # and the vertex-distance law is the same law
    assert np.max(np.abs(a.gamma_type_pdfs("vertex", y, lam) - a.corollary1_pdfs("r0_0", y, lam))) < 1e-12


def test_gamma_type_normalizations_and_rmin_moment():
    for which in ("edge", "vertex", "rmin"):
        total, _ = integrate.quad(lambda r: a.gamma_type_pdfs(which, r, 1.0), 0, 20)
        assert total == pytest.approx(1.0, abs=1e-9)
    second, _ = integrate.quad(lambda r: r * r * a.gamma_type_pdfs("rmin", r, 1.0), 0, 20)
    assert math.pi * second == pytest.approx(0.25, abs=1e-9)


def test_distribution_spec_normalizations():
    for fam, params in [
        ("typical_uniform_angle", {}),
        ("zero_r0_0", {}),
        ("zero_r0_pi", {}),
        ("zero_gap", {}),
        ("edge_distance", {}),
        ("vertex_distance", {}),
        ("rmin", {}),
        ("zero_directional", {"phi": 1.1}),
    ]:
        spec = a.DistributionSpec(fam, 1.0, params)
        total, _ = integrate.quad(lambda y: float(spec.pdf(y)), 0, 8, limit=300)
        assert total == pytest.approx(1.0, abs=1e-6), fam


def test_distribution_spec_validation():
    with pytest.raises(ValueError):
        a.DistributionSpec("nope", 1.0)
    with pytest.raises(ValueError):
        a.DistributionSpec("rmin", -1.0)


def test_uniform_angle_law():
    total, _ = integrate.quad(lambda y: float(a.zero_cell_uniform_angle_pdf(y, 1.0)), 0, 7, limit=100)
    assert total == pytest.approx(1.0, abs=1e-5)
    mean = a.zero_cell_uniform_angle_mean(1.0)
    assert mean == pytest.approx(0.5753, abs=1e-3)
    assert a.zero_cell_uniform_angle_mean(4.0) == pytest.approx(mean / 2.0, abs=5e-4)


def test_directional_cdf_fast_path():
    y = np.linspace(0.0, 2.5, 30)
    assert np.max(np.abs(a.zero_cell_directional_cdf(0.0, y) - a.corollary1_cdfs("r0_0", y))) < 1e-9
    assert np.max(np.abs(a.zero_cell_directional_cdf(math.pi, y) - a.corollary1_cdfs("r0_pi", y))) < 1e-9
    for phi in (0.3, 1.2, 2.9):
        for yy in (0.4, 1.0):
            slow, _ = integrate.quad(
                lambda t: float(a.zero_cell_marginal_pdf(phi, t)), 0, yy, limit=200
            )
            assert a.zero_cell_directional_cdf(phi, yy) == pytest.approx(slow, abs=5e-6)


def test_mean_area_quadrature():
    exact, approx = a.mean_area_quadrature(1.0)
    assert exact == pytest.approx(1.280176, abs=5e-4)
    assert approx == pytest.approx(1.2869, abs=1e-4)
    exact2, approx2 = a.mean_area_quadrature(2.0)
    assert exact2 == pytest.approx(exact / 2.0, abs=3e-4)
    assert approx2 == pytest.approx(approx / 2.0, abs=1e-12)


def test_second_moment_profile_gap_is_papers_own():
    # integrated approximation minus exact area = 1.2869 - 1.2802 at unit intensity
    exact, approx = a.mean_area_quadrature(1.0)
    assert approx - exact == pytest.approx(0.0067, abs=1e-3)


# ---------------------------------------------------------------------------
# 1-d law, ratio laws
# ---------------------------------------------------------------------------

def test_oned_cdf_values_and_monotonicity():
    assert a.oned_r_pi_cdf(0.0, 1.0) == 0.0
    grid = np.linspace(0, 8, 10_000)
    vals = a.oned_r_pi_cdf(grid, 1.0)
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[-1] == pytest.approx(1.0, abs=1e-6)
    assert a.oned_mean_rpi(1.0) == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert a.oned_mean_r0(1.0) == pytest.approx(2.0 / 3.0, abs=1e-6)


def test_ratio_laws():
    assert a.ratio_law_cdf(0, 0.5) == pytest.approx(0.25)
    assert a.ratio_law_ccdf(2, 0.5) == pytest.approx(0.5625)
    for i in (1, 2, 5):
        assert a.ratio_law_ccdf(i, 1.0) == 0.0
    with pytest.raises(ValueError):
        a.ratio_law_cdf(1, 1.5)


# ---------------------------------------------------------------------------
# hypergeometric moments and shadowing laws
# ---------------------------------------------------------------------------

def test_hyp2f1_against_mpmath():
    rng = np.random.default_rng(2)
    for _ in range(40):
        b = rng.uniform(0, 3)
        theta = rng.uniform(0, 50)
        delta = rng.uniform(0.05, 0.95)
        ref = float(mp.hyp2f1(b, -delta, 1 - delta, -theta))
        assert a.hyp2f1_neg_theta(b, theta, delta) == pytest.approx(ref, rel=1e-10)


def test_hyp2f1_closed_form_alpha4():
    for theta in (0.3, 1.0, 7.5):
        assert a.hyp2f1_neg_theta(1.0, theta, 0.5) == pytest.approx(
            1 + math.sqrt(theta) * math.atan(math.sqrt(theta)), rel=1e-12
        )


def test_standard_ppp_moments():
    assert a.standard_ppp_moments(1.0, 0.0, 4.0) == 1.0
    assert a.standard_ppp_moments(1.0, 1.0, 4.0) == pytest.approx(1 / (1 + math.pi / 4), rel=1e-12)
    assert a.misr_ppp(4.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        a.misr_ppp(2.0)


def test_shadowing_moments_and_dominance():
    lam, alpha, p0 = 1.0, 4.0, math.pi**2
    assert a.shadowing_mean("serving", lam, p0, alpha) == pytest.approx(6.0, rel=1e-12)
    assert a.shadowing_mean("interferer", lam, p0, alpha) == pytest.approx(2.0, rel=1e-12)
    t = np.geomspace(0.01, 100, 50)
    assert np.all(
        a.serving_shadowing_ccdf(t, lam, p0, alpha)
        >= a.interferer_shadowing_ccdf(t, lam, p0, alpha)
    )
    # moments via quadrature of the ccdf agree with the closed forms
    for which in ("serving", "interferer"):
        mean, _ = integrate.quad(
            lambda s: float(a.jsp_shadowing_laws(which, s, lam, p0, alpha)), 0, 2000, limit=500
        )
        assert mean == pytest.approx(a.shadowing_mean(which, lam, p0, alpha), rel=1e-6)


def test_shadowing_variances_match_quadrature():
    lam, alpha, p0 = 1.0, 4.0, math.pi**2
    for which, mean in (("serving", 6.0), ("interferer", 2.0)):
        second, _ = integrate.quad(
            lambda s: 2 * s * float(a.jsp_shadowing_laws(which, s, lam, p0, alpha)),
            0, 5000, limit=500,
        )
        assert second - mean**2 == pytest.approx(
            a.shadowing_var(which, lam, p0, alpha), rel=1e-5
        )


def test_serving_signal_ccdf():
    assert a.serving_signal_ccdf(0.5, 0.5, 4.0) == 1.0
    assert a.serving_signal_ccdf(0.2, 0.5, 4.0) == 1.0
    assert a.serving_signal_ccdf(2.0, 0.5, 4.0) == pytest.approx(0.5)
    # log-log slope of the tail is -delta
    t1, t2 = 100.0, 1000.0
    slope = (math.log(a.serving_signal_ccdf(t2, 0.5, 4.0)) - math.log(a.serving_signal_ccdf(t1, 0.5, 4.0))) / (
        math.log(t2) - math.log(t1)
    )
    assert slope == pytest.approx(-0.5, rel=1e-12)


# ---------------------------------------------------------------------------
# special functions against an arbitrary-precision oracle
# ---------------------------------------------------------------------------

def test_exp_e1_against_mpmath_20_points():
    xs = np.geomspace(0.01, 30, 20)
    ours = a.exp_e1(xs)
    for x, v in zip(xs, ours):
        assert v == pytest.approx(float(mp.e1(x)), rel=1e-12)


def test_erfc_and_inc_gamma_against_mpmath():
    from scipy import special

    for x in np.linspace(0, 4, 20):
        assert special.erfc(x) == pytest.approx(float(mp.erfc(x)), rel=1e-12, abs=1e-300)
    ref = float(mp.gammainc(mp.mpf(2) / 3, 0, mp.pi**1.5))
    assert a.lower_inc_gamma(2 / 3, math.pi**1.5) == pytest.approx(ref, rel=1e-12)
    for aa, z in [(0.5, 0.3), (1.5, 2.0), (3.0, 7.0)]:
        assert a.lower_inc_gamma(aa, z) == pytest.approx(float(mp.gammainc(aa, 0, z)), rel=1e-12)
