"""Numerical laboratory for the exterior Bernoulli free boundary problem of
the half Laplacian on star-shaped domains.

The package solves the overdetermined problem (capacitary potential of a
core K with constant half-order normal derivative on the free boundary) by
walk-on-spheres Monte Carlo plus a trial free-boundary iteration, and checks
the geometric structure of the solution family: inclusion monotonicity in
the derivative level, the logarithmic scaling metric bound, two-sided
distance bounds with explicit constants, scaling covariance, and the
normal-ray property against the convex hull of the core.
"""

__version__ = "0.1.0"

from .annulus import (AnnulusSpec, derivative_lower_bound,
                      derivative_upper_bound, form1_quadrature)
from .boundary_derivative import DerivativeEstimate, estimate_dhalf
from .bounds import (BoundReport, bound_report, distance_bracket, g_estimate,
                     g_exact, root_h)
from .geometry import (BallSpec, DirectionGrid, Halfspace, RadialDomain,
                       ball_domain, boundary_distance, boundary_point,
                       contains, convex_hull_contains, ellipse_domain,
                       interior_ball_radius, inward_normal, reflect)
from .metrics import inclusion, triangle_metric
from .solver import BernoulliSolution, SolverConfig, initial_guess, solve
from .stable_kernel import (HarmonicEstimate, WalkConfig, WalkOutcome,
                            harmonic_value, poisson_kernel, sample_exit, walk)
from .verify import (CheckResult, MovingPlaneProfile, VerificationReport,
                     check_distance_bounds, check_interior_positivity,
                     check_monotonicity, check_normal_rays,
                     check_reflection_positivity, check_triangle_bound,
                     moving_plane_profile, run_verification)
