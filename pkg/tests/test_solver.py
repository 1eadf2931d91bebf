import numpy as np
import numpy.testing as npt
import pytest

from halfbern import solver as sv
from halfbern.geometry import ball_domain, ellipse_domain
from halfbern.stable_kernel import WalkConfig


def quick_cfg(n_walks=1024, **kwargs):
    defaults = dict(walk=WalkConfig(n_walks=n_walks, base_seed=101),
                    tol_fb=0.2, max_outer_iters=8)
    defaults.update(kwargs)
    return sv.SolverConfig(**defaults)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"tol_fb": 0.0}, {"damping": 0.0}, {"damping": 1.5},
        {"smoothing_window": 4}, {"smoothing_window": 0},
        {"multiplier_clip": 1.0},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            sv.SolverConfig(**kwargs)


class TestInitialGuess:
    def test_unit_ball_unit_lam(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        guess = sv.initial_guess(K, 1.0)
        npt.assert_allclose(guess.radii, 2.0)

    def test_large_lam_small_offset(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        guess = sv.initial_guess(K, 10.0)
        npt.assert_allclose(guess.radii, 1.01)

    def test_small_lam_capped_at_ten_core_radii(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        guess = sv.initial_guess(K, 0.01)
        npt.assert_allclose(guess.radii, 11.0)

    def test_rejects_nonpositive_lam(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        with pytest.raises(ValueError):
            sv.initial_guess(K, 0.0)


class TestSolveD1:
    def test_converges_and_contains_core(self):
        K = ball_domain([0.0], 1.0)
        sol = sv.solve(K, 1.0, quick_cfg(n_walks=8000, tol_fb=0.08))
        assert sol.converged
        assert np.all(sol.domain.radii > K.radii)
        assert sol.residual < 0.08
        assert np.all(np.isfinite(sol.derivative_values))
        assert sol.iterations == len(sol.residual_history)

    def test_deterministic(self):
        K = ball_domain([0.0], 1.0)
        a = sv.solve(K, 1.5, quick_cfg())
        b = sv.solve(K, 1.5, quick_cfg())
        npt.assert_array_equal(a.domain.radii, b.domain.radii)
        assert a.residual == b.residual

    def test_rejects_nonpositive_lam(self):
        K = ball_domain([0.0], 1.0)
        with pytest.raises(ValueError):
            sv.solve(K, -1.0, quick_cfg())

    def test_monotone_in_lam(self):
        K = ball_domain([0.0], 1.0)
        cfg = quick_cfg(n_walks=4000, tol_fb=0.1)
        r_small = sv.solve(K, 2.0, cfg).domain.radii
        r_large = sv.solve(K, 0.5, cfg).domain.radii
        assert np.all(r_small < r_large)


class TestSolveD2:
    def test_small_budget_run(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        sol = sv.solve(K, 1.0, quick_cfg())
        assert np.all(sol.domain.radii > K.radii)
        rad = sol.domain.radii
        assert rad.std() / rad.mean() < 0.1
        assert sol.radius_sigma.shape == rad.shape
        assert np.all(sol.radius_sigma > 0)

    def test_unconverged_flagged(self):
        K = ball_domain([0.0, 0.0], 1.0, n=32)
        cfg = quick_cfg(tol_fb=1e-4, max_outer_iters=2)
        sol = sv.solve(K, 1.0, cfg)
        assert not sol.converged
        assert sol.iterations == 2

    def test_ellipse_core_runs(self):
        K = ellipse_domain([0.0, 0.0], 2.0, 1.0, n=64)
        sol = sv.solve(K, 1.0, quick_cfg())
        margins = sol.domain.radii - K.radii
        assert np.all(margins > 0)

    def test_d3_unsupported(self):
        K = ball_domain([0.0, 0.0, 0.0], 1.0, n=64)
        with pytest.raises(ValueError):
            sv.solve(K, 1.0, quick_cfg())


class TestSerialization:
    def test_round_trip(self, tmp_path):
        K = ball_domain([0.0], 1.0)
        sol = sv.solve(K, 1.0, quick_cfg(n_walks=500))
        path = tmp_path / "sol.json"
        sv.save_solution(sol, path)
        loaded = sv.load_solution(path)
        assert loaded.lam == sol.lam
        npt.assert_array_equal(loaded.domain.radii, sol.domain.radii)
        npt.assert_array_equal(loaded.derivative_values, sol.derivative_values)
        assert loaded.converged == sol.converged
        assert loaded.residual_history == sol.residual_history
        assert loaded.config == sol.config
