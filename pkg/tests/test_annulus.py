import math

import numpy as np
import pytest
from scipy import integrate

from halfbern import annulus as an
from halfbern.stable_kernel import WalkConfig


def spec_d1(r=1.0, R=2.0):
    return an.AnnulusSpec([0.0], r, R, 1)


def spec_d2(r=1.0, R=2.0):
    return an.AnnulusSpec([0.0, 0.0], r, R, 2)


class TestSpec:
    def test_rejects_bad_radii(self):
        with pytest.raises(ValueError):
            an.AnnulusSpec([0.0], 2.0, 1.0, 1)
        with pytest.raises(ValueError):
            an.AnnulusSpec([0.0], 0.0, 1.0, 1)

    def test_center_length_checked(self):
        with pytest.raises(ValueError):
            an.AnnulusSpec([0.0, 0.0], 1.0, 2.0, 1)


class TestClosedFormBounds:
    def test_d1_lower(self):
        assert an.derivative_lower_bound(spec_d1()) == pytest.approx(
            math.sqrt(2.0) / math.pi, rel=1e-14)

    def test_d1_upper_sharpened(self):
        assert an.derivative_upper_bound(spec_d1()) == pytest.approx(
            math.sqrt(3.0) / math.pi, rel=1e-14)

    def test_d2_constant(self):
        assert an.bracket_constant(2) == pytest.approx(
            2.0 / (3.0 * math.sqrt(2.0) * math.pi ** 2), rel=1e-14)

    def test_d2_lower_value(self):
        assert an.derivative_lower_bound(spec_d2()) == pytest.approx(
            0.016886863940, rel=1e-9)

    def test_d2_upper(self):
        assert an.derivative_upper_bound(spec_d2()) == 1.0

    def test_lower_vanishes_for_thick_annulus(self):
        wide = an.derivative_lower_bound(an.AnnulusSpec([0.0, 0.0], 1.0, 1e6, 2))
        assert wide < 1e-8

    def test_bracket_order(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            r = rng.uniform(0.1, 3.0)
            R = r + rng.uniform(0.05, 5.0)
            for d, c in ((1, [0.0]), (2, [0.0, 0.0]), (3, [0.0, 0.0, 0.0])):
                s = an.AnnulusSpec(c, r, R, d)
                assert an.derivative_lower_bound(s) < an.derivative_upper_bound(s)


class TestQuadrature:
    def test_d1_matches_closed_form(self):
        s = spec_d1()
        assert an.form1_quadrature(s) == pytest.approx(
            an.form1_closed_form_d1(s), rel=1e-10)

    def test_d1_dominates_relaxed_lower_bound(self):
        for r, R in ((1.0, 2.0), (0.5, 4.0), (2.0, 2.2)):
            s = an.AnnulusSpec([0.0], r, R, 1)
            assert an.form1_quadrature(s) >= an.derivative_lower_bound(s)

    def test_inside_bracket_d1_reference(self):
        v = an.form1_quadrature(spec_d1())
        assert 0.45016 < v < 0.55133

    def test_d2_against_brute_2d_quadrature(self):
        s = spec_d2()
        got = an.form1_quadrature(s)
        r, R = s.r, s.R
        rho = 0.5 * (R - r)
        c = 1.0 / math.pi ** 2

        def inner(z1):
            w = math.sqrt(max(r * r - (z1 - R) ** 2, 0.0))
            B = z1 * z1 - 2.0 * rho * z1
            val, _ = integrate.quad(
                lambda z2: 1.0 / math.sqrt(B + z2 * z2) / (z1 * z1 + z2 * z2),
                -w, w, limit=200)
            return c * math.sqrt(2.0 * rho) * val

        brute, _ = integrate.quad(inner, 2.0 * rho + 1e-12, R + r, limit=300)
        assert got == pytest.approx(brute, rel=1e-8)

    def test_bracket_property_random_specs(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            r = rng.uniform(0.2, 2.0)
            R = r + rng.uniform(0.1, 4.0)
            for d in (1, 2):
                s = an.AnnulusSpec([0.0] * d, r, R, d)
                v = an.form1_quadrature(s)
                assert an.derivative_lower_bound(s) <= v <= an.derivative_upper_bound(s)

    def test_scaling(self):
        s = spec_d2()
        t = 3.7
        st = an.AnnulusSpec([0.0, 0.0], t * s.r, t * s.R, 2)
        assert an.form1_quadrature(st) == pytest.approx(
            an.form1_quadrature(s) / math.sqrt(t), rel=1e-9)

    def test_bounds_scale_exactly(self):
        s = spec_d2()
        t = 2.0
        st = an.AnnulusSpec([0.0, 0.0], t * s.r, t * s.R, 2)
        assert an.derivative_lower_bound(st) == pytest.approx(
            an.derivative_lower_bound(s) / math.sqrt(t), rel=1e-14)
        assert an.derivative_upper_bound(st) == pytest.approx(
            an.derivative_upper_bound(s) / math.sqrt(t), rel=1e-14)

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            an.form1_quadrature(an.AnnulusSpec([0.0] * 3, 1.0, 2.0, 3))


class TestBarrier:
    def test_boundary_data_limits(self):
        cfg = WalkConfig(n_walks=4000, base_seed=31)
        s = spec_d2()
        near_core = an.barrier_value(s, [1.0 + 1e-3, 0.0], cfg, stream_tag=(0,))
        near_outer = an.barrier_value(s, [2.0 - 1e-3, 0.0], cfg, stream_tag=(1,))
        assert near_core.mean > 0.9
        assert near_outer.mean < 0.1

    def test_rejects_points_outside_annulus(self):
        cfg = WalkConfig(n_walks=10)
        with pytest.raises(ValueError):
            an.barrier_value(spec_d2(), [0.5, 0.0], cfg)
        with pytest.raises(ValueError):
            an.barrier_value(spec_d2(), [2.5, 0.0], cfg)

    def test_radial_monotonicity_statistical(self):
        # strict decrease in radius, sampled at 8 radii
        cfg = WalkConfig(n_walks=100_000, base_seed=32)
        s = spec_d2()
        radii = np.linspace(1.1, 1.9, 8)
        ests = [an.barrier_value(s, [float(r), 0.0], cfg, stream_tag=(k,))
                for k, r in enumerate(radii)]
        for a, b in zip(ests, ests[1:]):
            sigma = math.hypot(a.stderr, b.stderr)
            assert a.mean >= b.mean - 3.0 * sigma

    def test_derivative_estimate_runs(self):
        cfg = WalkConfig(n_walks=20_000, base_seed=33)
        s = spec_d1()
        est = an.derivative_estimate(s, cfg)
        lo = an.derivative_lower_bound(s)
        hi = an.derivative_upper_bound(s)
        assert lo - 3.0 * est.stderr < est.value < hi + 3.0 * est.stderr
