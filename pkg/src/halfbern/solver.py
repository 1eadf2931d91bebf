"""Trial free-boundary iteration for the exterior Bernoulli problem.

Given the core K and the derivative level lam, the free boundary is found by
a fixed-point iteration on the radial function: a dilation by t rescales the
half-order boundary derivative by t^(-1/2), so matching the per-direction
estimate D(theta) to lam suggests the local scale factor (D/lam)^2.  Because
the derivative responds to the gap between the free boundary and the core
(the annulus bracket scales like 1/sqrt(R - r)), the factor is applied to
the per-direction gap rho - rho_K rather than to the whole radius; the
radius-multiplicative variant is linearly unstable whenever the gap is thin
relative to the radius.  The factor is damped, clipped to a trust region,
and smoothed by a centered circular moving average (applied twice) before
multiplying, which keeps Monte Carlo noise out of the boundary while leaving
the fixed point D == lam exact.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .boundary_derivative import _weighted_line_fit
from .geometry import (RadialDomain, boundary_points, contains_many,
                       domain_from_dict, domain_to_dict,
                       distance_to_sampled_boundary, interior_ball_radius,
                       inward_normals)
from .rng import derive_seed
from .stable_kernel import WalkConfig, harmonic_values


@dataclass(frozen=True)
class SolverConfig:
    """Iteration parameters; all disclosed in the solution snapshot."""

    tol_fb: float = 0.05
    max_outer_iters: int = 40
    damping: float = 0.4
    smoothing_window: int = 5
    initial_guess_rule: str = "distance-upper"
    walk: WalkConfig = field(default_factory=lambda: WalkConfig(n_walks=32768))
    t0_fraction: float = 0.08
    t_ratio: float = 0.5
    t_points: int = 5
    multiplier_clip: float = 2.0

    def __post_init__(self):
        if self.tol_fb <= 0.0:
            raise ValueError("tol_fb must be positive")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ValueError("smoothing_window must be an odd count")
        if self.multiplier_clip <= 1.0:
            raise ValueError("multiplier_clip must exceed 1")


@dataclass(frozen=True)
class BernoulliSolution:
    """Converged (domain, lam) pair with per-direction diagnostics."""

    lam: float
    domain: RadialDomain
    derivative_values: np.ndarray
    derivative_stderrs: np.ndarray
    residual: float
    iterations: int
    converged: bool
    radius_sigma: np.ndarray
    residual_history: tuple
    config: dict


def initial_guess(core: RadialDomain, lam: float, r_core: float | None = None) -> RadialDomain:
    """Seed domain: core radii plus a uniform offset from the distance bounds.

    The offset is 1/lam^2 (the upper distance bound), floored at 0.1/lam^2
    and capped at 10 r_K; the cap wins for small lam so the iteration starts
    from a moderate domain and grows if needed.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if r_core is None:
        r_core = interior_ball_radius(core)
    offset = min(10.0 * r_core, max(1.0 / lam ** 2, 0.1 / lam ** 2))
    return RadialDomain(core.center, core.grid, core.radii + offset)


def _smooth_circular(values: np.ndarray, window: int) -> np.ndarray:
    if window <= 1 or values.size <= window:
        return values
    half = window // 2
    padded = np.concatenate([values[-half:], values, values[:half]])
    kernel = np.full(window, 1.0 / window)
    return np.convolve(padded, kernel, mode="valid")


def _inward_normal_grid(dom: RadialDomain) -> np.ndarray:
    if dom.dimension == 1:
        return -dom.grid.directions
    return inward_normals(dom)


def solve(core: RadialDomain, lam: float, cfg: SolverConfig | None = None) -> BernoulliSolution:
    """Approximate the free boundary for the given core and derivative level.

    The returned domain shares the core's grid and center.  If the residual
    target is not met within the iteration budget the best iterate is
    returned with ``converged=False``.
    """
    if cfg is None:
        cfg = SolverConfig()
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if core.dimension not in (1, 2):
        raise ValueError("solver supports d in {1, 2}")
    r_core = interior_ball_radius(core)
    rho = initial_guess(core, lam, r_core).radii.copy()
    grid = core.grid
    omega = RadialDomain(core.center, grid, rho)
    history = []
    values = stderrs = None
    iterations = 0
    converged = False
    for it in range(1, cfg.max_outer_iters + 1):
        iterations = it
        gap = rho - core.radii
        if np.any(gap <= 0.0):
            worst = int(np.argmin(gap))
            raise RuntimeError(
                f"iteration drove the boundary into the core at direction "
                f"{worst} (gap {gap[worst]:.3g})")
        omega = RadialDomain(core.center, grid, rho)
        values, stderrs = _derivative_profile(omega, core, cfg, it)
        residual = float(np.max(np.abs(values - lam)) / lam)
        history.append(residual)
        if residual < cfg.tol_fb:
            converged = True
            break
        if it == cfg.max_outer_iters:
            break
        ratio = np.maximum(values, 1e-12) / lam
        factor = np.clip(ratio ** (2.0 * cfg.damping),
                         1.0 / cfg.multiplier_clip, cfg.multiplier_clip)
        if core.dimension == 2:
            # smoothing the factor field (twice: triangular kernel) rather
            # than the radii keeps D == lam an exact fixed point while
            # suppressing the sub-grid modes, whose measured response to a
            # radial wiggle is steep enough to destabilize the iteration
            factor = _smooth_circular(_smooth_circular(factor,
                                                       cfg.smoothing_window),
                                      cfg.smoothing_window)
        # The derivative scales with the gap to the core (annulus bracket
        # ~ 1/sqrt(R - r)), so the dilation factor acts on the gap: applying
        # it to the whole radius makes the fixed point repel whenever the
        # gap is thin relative to the radius.
        rho = core.radii + (rho - core.radii) * factor
    radius_sigma = 2.0 * omega.radii * stderrs / lam
    snapshot = asdict(cfg)
    return BernoulliSolution(
        lam=float(lam),
        domain=omega,
        derivative_values=values,
        derivative_stderrs=stderrs,
        residual=history[-1],
        iterations=iterations,
        converged=converged,
        radius_sigma=radius_sigma,
        residual_history=tuple(history),
        config=snapshot,
    )


def _derivative_profile(omega: RadialDomain, core: RadialDomain,
                        cfg: SolverConfig, iteration: int):
    """Per-direction derivative estimates on the current boundary.

    All probe points (every direction and t-grid node) run as one walk batch;
    probe (i, k) owns the contiguous walk-index block (i*T + k) * n_walks.
    """
    bpts = boundary_points(omega)
    normals = _inward_normal_grid(omega)
    gaps = distance_to_sampled_boundary(core, bpts)
    n = bpts.shape[0]
    T = cfg.t_points
    t_grids = gaps[:, None] * cfg.t0_fraction * cfg.t_ratio ** np.arange(T)[None, :]
    probes = (bpts[:, None, :] + t_grids[:, :, None] * normals[:, None, :])
    probes = probes.reshape(n * T, -1)
    inside = contains_many(omega, probes) & ~contains_many(core, probes, closed=True)
    if not np.all(inside):
        bad = int(np.argmin(inside)) // T
        raise RuntimeError(
            f"probe points left the solve region at direction {bad} in "
            f"iteration {iteration}; boundary too irregular")
    seed = derive_seed(cfg.walk.base_seed, "solve", iteration)
    ests = harmonic_values(probes, omega, core, cfg.walk, seed)
    means = np.array([e.mean for e in ests]).reshape(n, T)
    stderrs = np.array([e.stderr for e in ests]).reshape(n, T)
    values = np.empty(n)
    value_ses = np.empty(n)
    sqrt_t = np.sqrt(t_grids)
    for i in range(n):
        if np.all(means[i] == 0.0):
            raise RuntimeError(
                f"all walks missed the core at direction {i} in iteration "
                f"{iteration}; geometry too thin for this walk budget")
        q = means[i] / sqrt_t[i]
        se = stderrs[i] / sqrt_t[i]
        values[i], value_ses[i], _ = _weighted_line_fit(t_grids[i], q, se)
    return values, value_ses


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def solution_to_dict(sol: BernoulliSolution) -> dict:
    return {
        "lambda": sol.lam,
        "domain": domain_to_dict(sol.domain),
        "derivative_values": sol.derivative_values.tolist(),
        "derivative_stderrs": sol.derivative_stderrs.tolist(),
        "residual": sol.residual,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "radius_sigma": sol.radius_sigma.tolist(),
        "residual_history": list(sol.residual_history),
        "config": sol.config,
    }


def solution_from_dict(data: dict) -> BernoulliSolution:
    return BernoulliSolution(
        lam=float(data["lambda"]),
        domain=domain_from_dict(data["domain"]),
        derivative_values=np.asarray(data["derivative_values"], dtype=float),
        derivative_stderrs=np.asarray(data["derivative_stderrs"], dtype=float),
        residual=float(data["residual"]),
        iterations=int(data["iterations"]),
        converged=bool(data["converged"]),
        radius_sigma=np.asarray(data["radius_sigma"], dtype=float),
        residual_history=tuple(data["residual_history"]),
        config=dict(data["config"]),
    )


def save_solution(sol: BernoulliSolution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(solution_to_dict(sol), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_solution(path) -> BernoulliSolution:
    with open(path, "r", encoding="utf-8") as fh:
        return solution_from_dict(json.load(fh))
