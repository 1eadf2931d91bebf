"""Closed-form two-sided bounds for the free-boundary distance.

For core radius r_K and derivative level lam the distance from the free
boundary to the core boundary satisfies

    g(lam) <= dist <= 1/lam^2,

where g comes from the annulus derivative bracket: with C the squared
dimension constant of the bracket, the scaled distance t = (dist/r_K)^(1/(2d-1))
satisfies h(t) = t^(2d) + t - A >= 0 for A = (C / (r_K lam^2))^(1/(2d-1)),
and g(lam) = r_K t(A)^(2d-1) with t(A) the unique positive root of h.

The displayed estimate (d >= 2)

    g(lam) >= C / (lam^2 (min{A_th, A_th^(1/2d)} + 1)^(2d-1)),   A_th = C/(r_K lam^2)

is a strict relaxation of the root formula and carries the asymptotic
exponents: dist ~ 1/lam^2 for large lam and ~ r_K^((2d-1)/2d) lam^(-1/d)
for small lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .annulus import bracket_constant


def squared_constant(d: int) -> float:
    """The constant C entering A: square of the annulus bracket constant."""
    return bracket_constant(d) ** 2


def root_h(A: float, d: int) -> float:
    """Unique positive root of h(t) = t^(2d) + t - A.

    Bisection on [0, max(A, A^(1/2d))] followed by Newton polish;
    |h(root)| < 1e-12 * max(1, A).
    """
    if A <= 0.0:
        raise ValueError("A must be positive")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    p = 2 * d

    def h(t):
        return t ** p + t - A

    def hp(t):
        return p * t ** (p - 1) + 1.0

    lo, hi = 0.0, max(A, A ** (1.0 / p))
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(8):
        t -= h(t) / hp(t)
        if lo <= t <= hi:
            continue
        t = min(max(t, lo), hi)
    if abs(h(t)) > 1e-12 * max(1.0, A):
        raise RuntimeError("root polishing failed to reach tolerance")
    return t


def proof_A(lam: float, r_K: float, d: int) -> float:
    """A entering h: (C / (r_K lam^2))^(1/(2d-1)) with C the squared constant."""
    return (squared_constant(d) / (r_K * lam * lam)) ** (1.0 / (2 * d - 1))


def theorem_A(lam: float, r_K: float, d: int) -> float:
    """A in the displayed estimate: C / (r_K lam^2)."""
    return squared_constant(d) / (r_K * lam * lam)


def g_exact(lam: float, r_K: float, d: int) -> float:
    """Lower distance bound g(lam) = r_K * root^(2d-1); strictly decreasing in lam."""
    if lam <= 0.0 or r_K <= 0.0:
        raise ValueError("lam and r_K must be positive")
    return r_K * root_h(proof_A(lam, r_K, d), d) ** (2 * d - 1)


def g_closed_form_d1(lam: float, r_K: float) -> float:
    """d=1 closed form: quadratic-formula solution of dist (r_K + dist) = C r_K / lam^2.

    C here is the square of the one-dimensional bracket constant, (2/pi)^2.
    """
    C = squared_constant(1)
    return 0.5 * (math.sqrt(r_K * r_K + 4.0 * C * r_K / (lam * lam)) - r_K)


def g_estimate(lam: float, r_K: float, d: int) -> float:
    """Displayed closed-form lower estimate for g; d >= 2 only."""
    if d < 2:
        raise ValueError("g_estimate requires d >= 2 (d=1 has the exact form)")
    if lam <= 0.0 or r_K <= 0.0:
        raise ValueError("lam and r_K must be positive")
    C = squared_constant(d)
    A = theorem_A(lam, r_K, d)
    m = min(A, A ** (1.0 / (2 * d)))
    return C / (lam * lam * (m + 1.0) ** (2 * d - 1))


def distance_bracket(lam: float, r_K: float, d: int) -> tuple[float, float]:
    """(lower, upper) = (g_exact, 1/lam^2); raises if the bracket is empty."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    lower = g_exact(lam, r_K, d)
    upper = 1.0 / (lam * lam)
    if lower > upper:
        raise RuntimeError("internal error: lower distance bound exceeds upper")
    return lower, upper


LARGE_LAMBDA = "large-lambda"
SMALL_LAMBDA = "small-lambda"


@dataclass(frozen=True)
class BoundReport:
    """Everything the distance-bound machinery produces for one (lam, r_K, d)."""

    lam: float
    r_K: float
    dimension: int
    constant: float           # squared bracket constant C
    A_proof: float            # (C/(r_K lam^2))^(1/(2d-1))
    A_theorem: float          # C/(r_K lam^2)
    t_root: float
    g_value: float
    g_estimate_gdrk: float | None
    upper_bound: float
    regime: str
    alpha: float
    beta: float


def bound_report(lam: float, r_K: float, d: int) -> BoundReport:
    A_p = proof_A(lam, r_K, d)
    A_t = theorem_A(lam, r_K, d)
    t = root_h(A_p, d)
    g = r_K * t ** (2 * d - 1)
    est = g_estimate(lam, r_K, d) if d >= 2 else None
    upper = 1.0 / (lam * lam)
    if A_t <= 1.0:
        regime, alpha, beta = LARGE_LAMBDA, 1.0, 0.0
    else:
        regime, alpha, beta = SMALL_LAMBDA, 1.0 / (2 * d), (2 * d - 1) / (2 * d)
    return BoundReport(lam, r_K, d, squared_constant(d), A_p, A_t, t, g, est,
                       upper, regime, alpha, beta)


def log_slope(values_fn, lams: np.ndarray) -> np.ndarray:
    """Finite-difference slopes of log f versus log lam on a grid."""
    g = np.array([values_fn(l) for l in lams])
    return np.diff(np.log(g)) / np.diff(np.log(lams))


def asymptotic_slopes(d: int, r_K: float, decades_below: float = 7.5,
                      decades_above: float = 3.0,
                      points_per_decade: int = 16) -> tuple[float, float]:
    """Measured log-log slopes of g_estimate at the small- and large-lam ends.

    The grid is centered at the regime crossover lam* = sqrt(C/r_K); the
    relaxation's +1 term makes the small-lam end approach its exponent only
    like lam^(1/2), hence the wide span below the crossover.
    Returns (slope_small_end, slope_large_end); the limits are -1/d and -2.
    """
    lam_star = math.sqrt(squared_constant(d) / r_K)
    n_lo = int(decades_below * points_per_decade)
    n_hi = int(decades_above * points_per_decade)
    exponents = np.linspace(-decades_below, decades_above, n_lo + n_hi + 1)
    lams = lam_star * 10.0 ** exponents
    slopes = log_slope(lambda l: g_estimate(l, r_K, d), lams)
    return float(slopes[0]), float(slopes[-1])
