"""Distance-bound machinery: root solve, curves, and asymptotic exponents.

The lower bound g comes from the unique positive root of t^(2d) + t = A;
the displayed relaxation carries the regime exponents: dist ~ 1/lam^2 for
large lam and ~ r_K^((2d-1)/2d) lam^(-1/d) for small lam.
"""

import numpy as np

from halfbern.bounds import (asymptotic_slopes, bound_report, g_estimate,
                             g_exact, root_h)

print("root examples for h(t) = t^(2d) + t - A:")
print(f"  d=1, A=1: t = {root_h(1.0, 1):.10f}  "
      f"((sqrt(5)-1)/2 = {(np.sqrt(5) - 1) / 2:.10f})")
print(f"  d=2, A=2: t = {root_h(2.0, 2):.10f}  (exactly 1)")

print("\nbound curves for r_K = 1, d = 2:")
print(f"{'lambda':>10} {'g_estimate':>12} {'g_exact':>12} {'1/lam^2':>12}")
for lam in np.geomspace(0.25, 4.0, 9):
    print(f"{lam:>10.4f} {g_estimate(lam, 1.0, 2):>12.6f} "
          f"{g_exact(lam, 1.0, 2):>12.6f} {1 / lam ** 2:>12.6f}")

print("\nfull report at lam = 1:")
rep = bound_report(1.0, 1.0, 2)
print(f"  A (root form) = {rep.A_proof:.6f}, A (estimate form) = "
      f"{rep.A_theorem:.6f}")
print(f"  t_root = {rep.t_root:.6f}, g = {rep.g_value:.6f}, "
      f"estimate = {rep.g_estimate_gdrk:.6f}, upper = {rep.upper_bound:.4f}")
print(f"  regime: {rep.regime} (alpha = {rep.alpha}, beta = {rep.beta})")

print("\nmeasured log-log slopes of the estimate at the grid ends:")
for d, below in ((2, 7.5), (3, 10.5)):
    small, large = asymptotic_slopes(d, 1.0, decades_below=below)
    print(f"  d={d}: large-lam end {large:.6f} (limit -2), "
          f"small-lam end {small:.6f} (limit {-1 / d:.4f})")
