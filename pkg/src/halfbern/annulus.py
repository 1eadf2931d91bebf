"""Capacitary barrier of a concentric-ball annulus and its derivative bracket.

The barrier b solves the half-Laplacian Dirichlet problem with data 1 on the
closed inner ball and 0 outside the outer ball; it is radial and strictly
decreasing.  Its half-order derivative at the outer boundary satisfies

    C_d / sqrt(R - r) * (r/R)^(d - 1/2)  <=  D b  <  1 / sqrt(R - r),

with the explicit constant C_1 = 2/pi and, for d >= 2,

    C_d = Gamma(d/2) / (2^((d-1)/2) (2d-1) Gamma((d+1)/2) pi^(3/2)).

For d = 1 the upper bound sharpens to sqrt(2)/(pi sqrt(R - r)) sqrt(1 + r/R).
The strict lower-bound integral behind these constants (the exit-kernel mass
sent into the inner ball from a small tangent ball of radius (R - r)/2) is
also evaluated by adaptive quadrature, giving a value inside the bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .boundary_derivative import DerivativeEstimate, estimate_dhalf, geometric_t_grid
from .geometry import RadialDomain, ball_domain
from .stable_kernel import HarmonicEstimate, WalkConfig, harmonic_value


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to meet the requested tolerance."""


@dataclass(frozen=True)
class AnnulusSpec:
    """Concentric ball pair: inner radius r, outer radius R, 0 < r < R."""

    center: np.ndarray
    r: float
    R: float
    dimension: int

    def __post_init__(self):
        if not (0.0 < self.r < self.R):
            raise ValueError("need 0 < r < R")
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if c.shape[0] != self.dimension:
            raise ValueError("center length must equal dimension")
        c.flags.writeable = False
        object.__setattr__(self, "center", c)

    def outer_domain(self, n: int | None = None) -> RadialDomain:
        return ball_domain(self.center, self.R, n)

    def inner_domain(self, n: int | None = None) -> RadialDomain:
        return ball_domain(self.center, self.r, n)


def bracket_constant(d: int) -> float:
    """Dimension constant of the closed-form derivative lower bound."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if d == 1:
        return 2.0 / math.pi
    return math.gamma(d / 2.0) / (
        2.0 ** ((d - 1) / 2.0) * (2 * d - 1) * math.gamma((d + 1) / 2.0)
        * math.pi ** 1.5
    )


def derivative_lower_bound(spec: AnnulusSpec) -> float:
    d, r, R = spec.dimension, spec.r, spec.R
    return bracket_constant(d) / math.sqrt(R - r) * (r / R) ** (d - 0.5)


def derivative_upper_bound(spec: AnnulusSpec) -> float:
    d, r, R = spec.dimension, spec.r, spec.R
    base = 1.0 / math.sqrt(R - r)
    if d == 1:
        sharp = math.sqrt(2.0) / (math.pi * math.sqrt(R - r)) * math.sqrt(1.0 + r / R)
        return min(base, sharp)
    return base


def barrier_value(spec: AnnulusSpec, x, cfg: WalkConfig,
                  stream_tag=()) -> HarmonicEstimate:
    """Walk-on-spheres estimate of the barrier at a point of the open annulus."""
    x = np.asarray(x, dtype=float).reshape(-1)
    s = float(np.linalg.norm(x - spec.center))
    if not (spec.r < s < spec.R):
        raise ValueError("x must lie strictly inside the open annulus")
    return harmonic_value(x, spec.outer_domain(), spec.inner_domain(), cfg,
                          stream_tag=("annulus",) + tuple(stream_tag))


def derivative_estimate(spec: AnnulusSpec, cfg: WalkConfig,
                        t_grid: np.ndarray | None = None) -> DerivativeEstimate:
    """Monte Carlo + extrapolation estimate of the derivative at the outer
    boundary point R * e_1."""
    e1 = np.zeros(spec.dimension)
    e1[0] = 1.0
    x = spec.center + spec.R * e1
    if t_grid is None:
        t_grid = geometric_t_grid(spec.R - spec.r)
    return estimate_dhalf(x, -e1, spec.outer_domain(), spec.inner_domain(),
                          cfg, t_grid=t_grid, stream_tag=("annulus-deriv",))


def form1_quadrature(spec: AnnulusSpec, rel_tol: float = 1e-6) -> float:
    """Strict lower-bound integral for the derivative at the outer boundary.

    Integrates the exit-kernel mass  c (2 rho)^(1/2) (|z|^2 - 2 rho z_1)^(-1/2)
    |z|^(-d)  over the ball of radius r centered at R e_1, with
    rho = (R - r)/2.  Supports d in {1, 2}; raises QuadratureError if the
    requested relative tolerance is not met.
    """
    d, r, R = spec.dimension, spec.r, spec.R
    rho = 0.5 * (R - r)
    c = math.gamma(d / 2.0) * math.pi ** (-1.0 - d / 2.0)
    if d == 1:
        # z in (2 rho, R + r); substitute z = 2 rho + w^2 to kill the
        # (z - 2 rho)^(-1/2) endpoint singularity.
        def f(w):
            z = 2.0 * rho + w * w
            return 2.0 * c * math.sqrt(2.0 * rho) / (z * math.sqrt(z))
        val, err = integrate.quad(f, 0.0, math.sqrt(R + r - 2.0 * rho),
                                  epsabs=0.0, epsrel=1e-10, limit=200)
    elif d == 2:
        # The z_2 integral has the closed form
        #   2 / (z1 sqrt(2 rho z1)) * artanh( sqrt(2 rho (R+r-z1) / (z1 (R+r))) ),
        # leaving a smooth one-dimensional integrand in z1.
        def f(z1):
            arg = math.sqrt(2.0 * rho * (R + r - z1) / (z1 * (R + r)))
            return (c * math.sqrt(2.0 * rho) * 2.0
                    / (z1 * math.sqrt(2.0 * rho * z1)) * math.atanh(arg))
        val, err = integrate.quad(f, 2.0 * rho, R + r, epsabs=0.0,
                                  epsrel=1e-10, limit=200)
    else:
        raise ValueError("form1_quadrature supports d in {1, 2}")
    if not math.isfinite(val) or err > rel_tol * abs(val):
        raise QuadratureError(
            f"quadrature error {err:.3g} exceeds {rel_tol:.1g} relative")
    return val


def form1_closed_form_d1(spec: AnnulusSpec) -> float:
    """Exact value of the d=1 lower-bound integral: (2/pi) sqrt(2r/((R-r)(R+r)))."""
    if spec.dimension != 1:
        raise ValueError("closed form is d=1 only")
    r, R = spec.r, spec.R
    return (2.0 / math.pi) * math.sqrt(2.0 * r / ((R - r) * (R + r)))
