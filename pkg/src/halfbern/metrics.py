"""Logarithmic scaling distance between star-shaped domains.

For sets star-shaped about x0 and represented radially, dilating by mu about
x0 multiplies the radial function by mu, so the mutual-inclusion infimum

    inf{ |ln mu| : mu <= 1, mu-dilates of either set nest in the other }

collapses to a closed form in the radius ratios:
mu* = min(1, min rho_a/rho_b, min rho_b/rho_a) and the metric is |ln mu*|.
"""

from __future__ import annotations

import numpy as np

from .geometry import RadialDomain, resample_about


def _in_frame(dom: RadialDomain, x0: np.ndarray, grid) -> bool:
    return (np.array_equal(dom.center, x0)
            and (dom.grid is grid
                 or np.array_equal(dom.grid.directions, grid.directions)))


def _common_radii(a: RadialDomain, b: RadialDomain, x0=None):
    """Radial functions of a and b about a shared center on a shared grid."""
    if x0 is None:
        if not np.allclose(a.center, b.center):
            raise ValueError("domains have different centers; pass x0 explicitly")
        x0 = a.center
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    grid = a.grid
    ra = a if _in_frame(a, x0, grid) else resample_about(a, x0, grid)
    rb = b if _in_frame(b, x0, grid) else resample_about(b, x0, grid)
    return ra.radii, rb.radii


def triangle_metric(a: RadialDomain, b: RadialDomain, x0=None) -> float:
    """Scaling metric |ln mu*| between two domains star-shaped about x0.

    mu* = min(1, min rho_a/rho_b, min rho_b/rho_a), so |ln mu*| equals the
    largest absolute log-ratio of the radial functions; the log form is
    evaluated directly because it is exactly symmetric in (a, b).

    Domains stored about a different center are re-anchored by radial
    resampling; that raises if either is not star-shaped about x0.
    """
    rho_a, rho_b = _common_radii(a, b, x0)
    return float(np.max(np.abs(np.log(rho_a) - np.log(rho_b))))


def inclusion(a: RadialDomain, b: RadialDomain, x0=None, slack=0.0) -> bool:
    """True iff a is contained in b on the common grid: rho_a <= rho_b + slack.

    ``slack`` may be a scalar or per-direction array (statistical tolerance
    for Monte Carlo domains).
    """
    rho_a, rho_b = _common_radii(a, b, x0)
    return bool(np.all(rho_a <= rho_b + slack))


def inclusion_margins(a: RadialDomain, b: RadialDomain, x0=None) -> np.ndarray:
    """Per-direction margins rho_b - rho_a (positive where a sits inside b)."""
    rho_a, rho_b = _common_radii(a, b, x0)
    return rho_b - rho_a
