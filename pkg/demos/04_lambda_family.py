"""A family of free boundaries over the derivative level.

Solves three levels on the same ball core and checks the family structure:
larger levels give strictly smaller domains, the scaling metric between two
members is controlled by 2 |ln lam2 - ln lam1|, and every boundary sits
inside its distance bracket.  Writes an SVG figure with the inward normal
rays (they all pass through the convex hull of the core).
"""

from halfbern.geometry import ball_domain
from halfbern.solver import SolverConfig
from halfbern.stable_kernel import WalkConfig
from halfbern.solver import solution_from_dict
from halfbern.verify import render_family_svg, report_csv, run_verification

core = ball_domain([0.0, 0.0], 1.0, n=48)
cfg = SolverConfig(walk=WalkConfig(n_walks=4096, base_seed=42),
                   tol_fb=0.15, t_ratio=0.5)

print("solving lam in {0.5, 1, 2} and running all suites...")
report = run_verification(core, [0.5, 1.0, 2.0], cfg, suites=("all",))

for check in report.checks:
    print(f"  {check.name:28s} {check.status:12s} margin {check.margin:9.4f}")

print("\nsummary table:")
print(report_csv(report), end="")

sols = [solution_from_dict(s) for s in report.solutions]
svg = render_family_svg(core, sols, rays=True)
with open("family.svg", "w", encoding="utf-8") as fh:
    fh.write(svg)
print("\nwrote family.svg (core, three free boundaries, normal rays)")
