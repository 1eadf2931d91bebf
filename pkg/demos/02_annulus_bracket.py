"""Two-sided bracket for the barrier derivative on a concentric annulus.

The capacitary barrier of the annulus r < |x| < R has a half-order outer
derivative trapped between explicit closed forms; the strict lower-bound
integral (evaluated by quadrature) and a walk-on-spheres extrapolation
estimate must both land inside the bracket.
"""

import numpy as np

from halfbern.annulus import (AnnulusSpec, barrier_value, derivative_estimate,
                              derivative_lower_bound, derivative_upper_bound,
                              form1_quadrature)
from halfbern.stable_kernel import WalkConfig

cfg = WalkConfig(n_walks=40_000, base_seed=42)

print("bracket and estimates for r=1, R=2:")
print(f"{'d':>2} {'lower':>10} {'quadrature':>11} {'estimate':>9} "
      f"{'sigma':>8} {'upper':>10}")
for d in (1, 2):
    spec = AnnulusSpec([0.0] * d, 1.0, 2.0, d)
    est = derivative_estimate(spec, cfg)
    print(f"{d:>2} {derivative_lower_bound(spec):>10.5f} "
          f"{form1_quadrature(spec):>11.5f} {est.value:>9.5f} "
          f"{est.stderr:>8.5f} {derivative_upper_bound(spec):>10.5f}")

print("\nradial monotonicity of the d=2 barrier (8 interior radii):")
spec = AnnulusSpec([0.0, 0.0], 1.0, 2.0, 2)
for k, s in enumerate(np.linspace(1.1, 1.9, 8)):
    est = barrier_value(spec, [float(s), 0.0], cfg, stream_tag=(k,))
    print(f"  |x| = {s:.3f}:  b = {est.mean:.4f} +- {est.stderr:.4f}")

print("\nscaling covariance (all lengths doubled => derivative / sqrt(2)):")
spec2 = AnnulusSpec([0.0, 0.0], 2.0, 4.0, 2)
print(f"  quadrature(2r, 2R) * sqrt(2) = "
      f"{form1_quadrature(spec2) * np.sqrt(2):.8f}")
print(f"  quadrature(r, R)             = {form1_quadrature(spec):.8f}")
