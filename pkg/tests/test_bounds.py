import math

import numpy as np
import pytest

from halfbern import bounds as bd


class TestRootH:
    def test_golden_ratio(self):
        assert bd.root_h(1.0, 1) == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0,
                                                  abs=1e-14)

    def test_exact_unit_root(self):
        assert bd.root_h(2.0, 2) == pytest.approx(1.0, abs=1e-14)

    def test_small_A_limit(self):
        for d in (1, 2, 3):
            assert bd.root_h(1e-12, d) < 2e-12

    def test_residual_tolerance(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            A = float(10.0 ** rng.uniform(-8, 8))
            d = int(rng.integers(1, 4))
            t = bd.root_h(A, d)
            assert abs(t ** (2 * d) + t - A) <= 1e-12 * max(1.0, A)
            assert t > 0.0

    def test_rejects_nonpositive_A(self):
        with pytest.raises(ValueError):
            bd.root_h(0.0, 2)


class TestGExact:
    def test_d1_closed_form(self):
        for lam in (0.05, 0.3, 1.0, 4.0, 50.0):
            for rk in (0.3, 1.0, 2.7):
                assert bd.g_exact(lam, rk, 1) == pytest.approx(
                    bd.g_closed_form_d1(lam, rk), abs=1e-10)

    def test_strictly_decreasing_in_lam(self):
        lams = np.geomspace(1e-3, 1e3, 60)
        g = np.array([bd.g_exact(l, 1.0, 2) for l in lams])
        assert np.all(np.diff(g) < 0.0)

    def test_diverges_as_lam_vanishes(self):
        assert bd.g_exact(1e-8, 1.0, 2) > 1e3

    def test_implicit_relation_equality(self):
        # at dist = g the distance inequality chain is tight
        for d in (1, 2, 3):
            lam, rk = 0.7, 2.0
            g = bd.g_exact(lam, rk, d)
            C = bd.squared_constant(d)
            lhs = g ** (1.0 / (2 * d - 1)) * (rk + g)
            rhs = C ** (1.0 / (2 * d - 1)) * rk / lam ** (2.0 / (2 * d - 1))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_dimensional_scaling_d1(self):
        g1 = bd.g_exact(1.0, 1.0, 1)
        g2 = bd.g_exact(0.5, 4.0, 1)
        assert g2 == pytest.approx(4.0 * g1, rel=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            bd.g_exact(0.0, 1.0, 2)
        with pytest.raises(ValueError):
            bd.g_exact(1.0, -1.0, 2)


class TestGEstimate:
    def test_d1_unsupported(self):
        with pytest.raises(ValueError):
            bd.g_estimate(1.0, 1.0, 1)

    @pytest.mark.parametrize("d", [2, 3])
    def test_dominated_by_exact_on_grid(self, d):
        lams = np.geomspace(1e-2, 1e2, 20)
        rks = np.geomspace(1e-1, 1e1, 20)
        for lam in lams:
            for rk in rks:
                est = bd.g_estimate(lam, rk, d)
                assert 0.0 < est <= bd.g_exact(lam, rk, d) * (1.0 + 1e-12)

    def test_large_lam_matches_inverse_square(self):
        C = bd.squared_constant(2)
        lam = 1e6
        assert bd.g_estimate(lam, 1.0, 2) == pytest.approx(C / lam ** 2,
                                                           rel=1e-5)

    @pytest.mark.parametrize("d,below", [(2, 7.5), (3, 10.5)])
    def test_asymptotic_slopes(self, d, below):
        small, large = bd.asymptotic_slopes(d, 1.0, decades_below=below)
        assert large == pytest.approx(-2.0, abs=1e-3)
        assert small == pytest.approx(-1.0 / d, abs=1e-3)


class TestDistanceBracket:
    def test_upper_bound(self):
        lower, upper = bd.distance_bracket(2.0, 1.0, 2)
        assert upper == 0.25
        assert 0.0 < lower <= upper

    def test_lower_is_g_exact(self):
        lower, _ = bd.distance_bracket(1.0, 1.0, 2)
        assert lower == bd.g_exact(1.0, 1.0, 2)

    def test_bracket_never_empty(self):
        for lam in np.geomspace(1e-3, 1e3, 30):
            lower, upper = bd.distance_bracket(float(lam), 1.0, 2)
            assert lower <= upper


class TestBoundReport:
    def test_fields_consistent(self):
        rep = bd.bound_report(1.0, 1.0, 2)
        assert rep.t_root == pytest.approx(bd.root_h(rep.A_proof, 2), abs=1e-14)
        assert rep.g_value == pytest.approx(bd.g_exact(1.0, 1.0, 2), rel=1e-14)
        assert 0.0 < rep.g_estimate_gdrk <= rep.g_value <= rep.upper_bound
        assert rep.A_theorem == pytest.approx(bd.squared_constant(2))

    def test_regime_tags(self):
        large = bd.bound_report(10.0, 1.0, 2)
        small = bd.bound_report(1e-3, 1.0, 2)
        assert large.regime == bd.LARGE_LAMBDA
        assert (large.alpha, large.beta) == (1.0, 0.0)
        assert small.regime == bd.SMALL_LAMBDA
        assert (small.alpha, small.beta) == (0.25, 0.75)

    def test_d1_report_has_no_estimate(self):
        rep = bd.bound_report(1.0, 1.0, 1)
        assert rep.g_estimate_gdrk is None
