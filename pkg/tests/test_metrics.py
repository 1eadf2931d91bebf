import math

import numpy as np
import pytest

from halfbern import metrics as mt
from halfbern.geometry import DirectionGrid, RadialDomain, ball_domain


def star(radii, center=(0.0, 0.0)):
    grid = DirectionGrid.make(2, len(radii))
    return RadialDomain(np.asarray(center, dtype=float), grid,
                        np.asarray(radii, dtype=float))


def mu_grid_oracle(rho_a, rho_b):
    """Direct infimum over a mu grid of the mutual-inclusion condition."""
    best = math.inf
    for k in range(0, 8000):
        mu = math.exp(-k / 1000.0)
        if np.all(mu * rho_a <= rho_b) and np.all(mu * rho_b <= rho_a):
            best = min(best, abs(math.log(mu)))
    return best


class TestTriangleMetric:
    def test_identical_domains(self):
        B = ball_domain([0.0, 0.0], 2.0, n=32)
        assert mt.triangle_metric(B, B) == 0.0

    def test_concentric_balls(self):
        B2 = ball_domain([0.0, 0.0], 2.0, n=32)
        B3 = ball_domain([0.0, 0.0], 3.0, n=32)
        assert mt.triangle_metric(B2, B3) == pytest.approx(math.log(1.5),
                                                           rel=1e-12)

    def test_uniform_half_scale(self):
        rng = np.random.default_rng(2)
        radii = 1.0 + rng.uniform(0.0, 1.0, 64)
        a = star(0.5 * radii)
        b = star(radii)
        assert mt.triangle_metric(a, b) == pytest.approx(math.log(2.0),
                                                         rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        a = star(1.0 + rng.uniform(0, 1, 32))
        b = star(1.0 + rng.uniform(0, 1, 32))
        assert mt.triangle_metric(a, b) == mt.triangle_metric(b, a)

    def test_pure_scaling_property(self):
        rng = np.random.default_rng(4)
        radii = 1.0 + rng.uniform(0, 2, 48)
        a = star(radii)
        for s in (0.1, 0.37, 0.9, 1.0):
            scaled = star(s * radii)
            assert mt.triangle_metric(scaled, a) == pytest.approx(
                abs(math.log(s)), abs=1e-12)

    def test_against_mu_grid_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            ra = 1.0 + rng.uniform(0, 1, 24)
            rb = 1.0 + rng.uniform(0, 1, 24)
            got = mt.triangle_metric(star(ra), star(rb))
            assert got == pytest.approx(mu_grid_oracle(ra, rb), abs=1e-3)

    def test_zero_iff_equal_radii(self):
        a = star(np.full(16, 2.0))
        b = star(np.concatenate([[2.0 + 1e-6], np.full(15, 2.0)]))
        assert mt.triangle_metric(a, b) > 0.0

    def test_reanchoring(self):
        B2 = ball_domain([0.0, 0.0], 2.0, n=256)
        B3_shift = ball_domain([0.3, 0.0], 3.0, n=256)
        got = mt.triangle_metric(B2, B3_shift, [0.0, 0.0])
        # about the origin the shifted ball has max radius 3.3
        assert got == pytest.approx(math.log(3.3 / 2.0), abs=1e-3)

    def test_reanchoring_failure(self):
        B1 = ball_domain([0.0, 0.0], 1.0, n=64)
        B_far = ball_domain([10.0, 0.0], 1.0, n=64)
        with pytest.raises(ValueError):
            mt.triangle_metric(B1, B_far, [0.0, 0.0])

    def test_different_centers_require_x0(self):
        B1 = ball_domain([0.0, 0.0], 1.0, n=64)
        B2 = ball_domain([0.5, 0.0], 2.0, n=64)
        with pytest.raises(ValueError):
            mt.triangle_metric(B1, B2)


class TestInclusion:
    def test_nested_balls(self):
        B2 = ball_domain([0.0, 0.0], 2.0, n=32)
        B3 = ball_domain([0.0, 0.0], 3.0, n=32)
        assert mt.inclusion(B2, B3)
        assert not mt.inclusion(B3, B2)

    def test_statistical_slack(self):
        rng = np.random.default_rng(6)
        base = 2.0 + rng.uniform(0, 0.5, 32)
        noisy = base + rng.normal(0.0, 0.01, 32)
        assert mt.inclusion(star(noisy), star(base), slack=0.05)

    def test_margins(self):
        B2 = ball_domain([0.0, 0.0], 2.0, n=32)
        B3 = ball_domain([0.0, 0.0], 3.0, n=32)
        np.testing.assert_allclose(mt.inclusion_margins(B2, B3), 1.0)
