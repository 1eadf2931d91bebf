"""Generalized half-order normal derivative from potential values.

The boundary behavior u(x + t n) ~ psi(x) sqrt(t) (1 + O(t)) makes the
quotient q(t) = u(x + t n)/sqrt(t) linear in t to leading order, so the
derivative is recovered as the intercept of a weighted least-squares line
through Monte Carlo estimates of q on a geometric t-grid.  A constant fit
would bias the estimate; the linear term absorbs the O(t) correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RadialDomain, contains_many, distance_to_sampled_boundary
from .rng import derive_seed
from .stable_kernel import WalkConfig, harmonic_values


@dataclass(frozen=True)
class DerivativeEstimate:
    """Half-order normal derivative with statistical and fit diagnostics.

    ``value`` is the extrapolated intercept (units 1/sqrt(length)), ``slope``
    the fitted linear coefficient of q(t), useful for judging whether the
    t-grid sits in the asymptotic regime.
    """

    value: float
    stderr: float
    t_grid: np.ndarray
    quotients: np.ndarray
    quotient_stderrs: np.ndarray
    slope: float


def geometric_t_grid(gap: float, t0_fraction: float = 0.08, ratio: float = 0.5,
                     n_points: int = 5) -> np.ndarray:
    """Strictly decreasing geometric probe offsets t_k = t0 * ratio^k."""
    if not (0.0 < ratio < 1.0):
        raise ValueError("ratio must lie in (0, 1)")
    t0 = t0_fraction * gap
    return t0 * ratio ** np.arange(n_points)


def _weighted_line_fit(t: np.ndarray, q: np.ndarray, se: np.ndarray):
    """Fit q = a + b t by weighted least squares; returns (a, stderr_a, b)."""
    if np.all(se == 0.0):
        w = np.ones_like(q)
        exact = True
    else:
        floor = 1e-12 * (np.max(np.abs(q)) + 1.0)
        w = 1.0 / np.maximum(se, floor) ** 2
        exact = False
    X = np.column_stack([np.ones_like(t), t])
    XtW = X.T * w
    cov = np.linalg.inv(XtW @ X)
    coef = cov @ (XtW @ q)
    stderr_a = 0.0 if exact else float(np.sqrt(cov[0, 0]))
    return float(coef[0]), stderr_a, float(coef[1])


def estimate_dhalf(x, normal, omega: RadialDomain, core: RadialDomain,
                   cfg: WalkConfig, t_grid: np.ndarray | None = None,
                   value_fn=None, stream_tag=()) -> DerivativeEstimate:
    """Estimate the half-order derivative of the potential at boundary point x.

    Parameters
    ----------
    x, normal : boundary point of ``omega`` and its inward unit normal.
    t_grid : probe offsets; defaults to a geometric grid anchored at
        0.08 * dist(x, boundary of core).
    value_fn : optional callable pts -> (means, stderrs) replacing the Monte
        Carlo potential (used by deterministic tests).
    stream_tag : ints/strings making the random stream unique per call site.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    normal = np.asarray(normal, dtype=float).reshape(-1)
    if t_grid is None:
        gap = float(distance_to_sampled_boundary(core, x[None, :])[0])
        t_grid = geometric_t_grid(gap)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise ValueError("t_grid needs at least two points")
    if np.any(np.diff(t_grid) >= 0.0) or np.any(t_grid <= 0.0):
        raise ValueError("t_grid must be strictly decreasing and positive")
    probes = x[None, :] + t_grid[:, None] * normal[None, :]
    if value_fn is not None:
        means, stderrs = value_fn(probes)
        means = np.asarray(means, dtype=float)
        stderrs = np.asarray(stderrs, dtype=float)
    else:
        inside = contains_many(omega, probes) & ~contains_many(core, probes, closed=True)
        if not np.all(inside):
            raise ValueError("t-grid probe point outside the solve region")
        seed = derive_seed(cfg.base_seed, "dhalf", *stream_tag)
        ests = harmonic_values(probes, omega, core, cfg, seed)
        means = np.array([e.mean for e in ests])
        stderrs = np.array([e.stderr for e in ests])
        if np.all(means == 0.0):
            raise RuntimeError("all walks missed the core; geometry too thin "
                               "for this walk budget")
    sqrt_t = np.sqrt(t_grid)
    q = means / sqrt_t
    se = stderrs / sqrt_t
    value, stderr, slope = _weighted_line_fit(t_grid, q, se)
    return DerivativeEstimate(value, stderr, t_grid, q, se, slope)
