"""Family-level verification experiments on solved free boundaries.

Checks implemented on families {Omega_lam}:
  * inclusion monotonicity in lam (statistical, 3-sigma per direction),
  * the scaling-metric bound  metric <= 2 |ln lam2 - ln lam1|,
  * two-sided distance bounds  g(lam) <= dist <= 1/lam^2,
  * the inward-normal-ray property against the convex hull of the core,
  * moving-plane critical offsets (t0, t1) with contact classification,
  * reflection positivity of v_t = u o Q_t - u via paired common-random-
    number walks.

Every check reports PASS, FAIL, or INCONCLUSIVE together with its margin and
statistical scale; INCONCLUSIVE is reserved for margins that straddle zero.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .bounds import distance_bracket
from .geometry import (Halfspace, RadialDomain, boundary_distance,
                       boundary_points, contains_many, convex_hull,
                       domain_from_dict, domain_to_dict, interior_ball_radius,
                       inward_normals, reflect)
from .metrics import triangle_metric
from .rng import derive_seed
from .solver import (BernoulliSolution, SolverConfig, solution_from_dict,
                     solution_to_dict, solve)
from .stable_kernel import harmonic_value, run_walks

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

SUITES = ("monotonicity", "triangle", "distance", "rays", "moving-plane", "hopf")


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    margin: float
    sigma: float
    tolerance: float
    details: dict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "margin": self.margin,
            "sigma": self.sigma,
            "tolerance": self.tolerance,
            "details": self.details,
        }

    @staticmethod
    def from_dict(data: dict) -> "CheckResult":
        return CheckResult(data["name"], data["status"], data["margin"],
                           data["sigma"], data["tolerance"],
                           dict(data["details"]))


@dataclass(frozen=True)
class VerificationReport:
    experiment_id: str
    core: dict
    lambdas: tuple
    solutions: tuple          # solution dicts, one per lambda
    checks: tuple             # CheckResult
    seed: int
    config: dict

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "core": self.core,
            "lambdas": list(self.lambdas),
            "solutions": list(self.solutions),
            "checks": [c.to_dict() for c in self.checks],
            "seed": self.seed,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_dict(data: dict) -> "VerificationReport":
        return VerificationReport(
            experiment_id=data["experiment_id"],
            core=dict(data["core"]),
            lambdas=tuple(data["lambdas"]),
            solutions=tuple(data["solutions"]),
            checks=tuple(CheckResult.from_dict(c) for c in data["checks"]),
            seed=int(data["seed"]),
            config=dict(data["config"]),
        )

    @staticmethod
    def from_json(text: str) -> "VerificationReport":
        return VerificationReport.from_dict(json.loads(text))

    def all_pass(self) -> bool:
        return all(c.status != FAIL for c in self.checks)


# ---------------------------------------------------------------------------
# family checks
# ---------------------------------------------------------------------------

def _converged_only(solutions):
    kept = [s for s in solutions if s.converged]
    skipped = [s.lam for s in solutions if not s.converged]
    return kept, skipped


def check_monotonicity(solutions: list[BernoulliSolution]) -> CheckResult:
    """Pairwise statistical inclusion: larger lam gives the smaller domain."""
    sols, skipped = _converged_only(solutions)
    sols = sorted(sols, key=lambda s: s.lam)
    worst = math.inf
    pairs = []
    for i in range(len(sols)):
        for j in range(i + 1, len(sols)):
            a, b = sols[i], sols[j]  # lam_a < lam_b, expect domain_b inside
            margins = a.domain.radii - b.domain.radii
            sigma = np.sqrt(a.radius_sigma ** 2 + b.radius_sigma ** 2)
            slack_margin = float(np.min(margins - 3.0 * sigma))
            worst = min(worst, slack_margin)
            pairs.append({"lam_small": a.lam, "lam_large": b.lam,
                          "min_margin": float(np.min(margins)),
                          "min_margin_minus_3sigma": slack_margin})
    status = PASS if (not pairs or worst > 0.0) else FAIL
    sigma_scale = float(np.max([np.max(s.radius_sigma) for s in sols])) if sols else 0.0
    return CheckResult("monotonicity", status,
                       worst if pairs else 0.0, sigma_scale, 0.0,
                       {"pairs": pairs, "skipped_unconverged": skipped})


def check_triangle_bound(s1: BernoulliSolution, s2: BernoulliSolution) -> CheckResult:
    """Scaling metric against 2 |ln lam2 - ln lam1| with 3-sigma slack."""
    tri = triangle_metric(s1.domain, s2.domain)
    bound = 2.0 * abs(math.log(s2.lam) - math.log(s1.lam))
    rel1 = s1.radius_sigma / s1.domain.radii
    rel2 = s2.radius_sigma / s2.domain.radii
    sigma = float(np.max(np.sqrt(rel1 ** 2 + rel2 ** 2)))
    margin = bound + 3.0 * sigma - tri
    return CheckResult("triangle-bound", PASS if margin >= 0.0 else FAIL,
                       margin, sigma, bound,
                       {"metric": tri, "bound": bound,
                        "lam_pair": [s1.lam, s2.lam]})


def check_distance_bounds(sol: BernoulliSolution, core: RadialDomain) -> CheckResult:
    """Two-sided distance bracket at this solution's lam."""
    d = core.dimension
    dist = boundary_distance(sol.domain, core)
    r_core = interior_ball_radius(core)
    lower, upper = distance_bracket(sol.lam, r_core, d)
    slack = 3.0 * float(np.max(sol.radius_sigma))
    margin = min(dist - (lower - slack), (upper + slack) - dist)
    return CheckResult("distance-bounds", PASS if margin >= 0.0 else FAIL,
                       margin, slack / 3.0, upper,
                       {"lam": sol.lam, "dist": dist, "lower": lower,
                        "upper": upper, "r_core": r_core,
                        "grid_n": core.grid.n})


# ---------------------------------------------------------------------------
# normal rays and the convex hull of the core
# ---------------------------------------------------------------------------

def ray_hull_interval(p: np.ndarray, u: np.ndarray, hull: np.ndarray,
                      slack: float = 1e-9):
    """Parameter interval [t_lo, t_hi] where p + t u lies in the hull, or None.

    Half-plane clipping against the CCW hull edges.
    """
    nxt = np.roll(hull, -1, axis=0)
    edges = nxt - hull
    # outward normal of a CCW edge is (e_y, -e_x)
    normals = np.column_stack([edges[:, 1], -edges[:, 0]])
    a = normals @ u
    b = np.einsum("ij,ij->i", normals, p[None, :] - hull)
    t_lo, t_hi = 0.0, math.inf
    for ai, bi in zip(a, b):
        if abs(ai) < 1e-15:
            if bi > slack:
                return None
            continue
        bound = (slack - bi) / ai
        if ai > 0:
            t_hi = min(t_hi, bound)
        else:
            t_lo = max(t_lo, bound)
    if t_lo > t_hi:
        return None
    return t_lo, t_hi


def ray_hull_angular_margin(p: np.ndarray, u: np.ndarray, hull: np.ndarray) -> float:
    """Angle by which the ray clears the cone of hull directions seen from p.

    Positive iff the ray from p with direction u meets the hull (p outside).
    """
    rel = hull - p[None, :]
    centroid = np.mean(rel, axis=0)
    base = math.atan2(centroid[1], centroid[0])

    def wrap(x):
        return (x + math.pi) % (2.0 * math.pi) - math.pi

    offs = np.array([wrap(math.atan2(r[1], r[0]) - base) for r in rel])
    du = wrap(math.atan2(u[1], u[0]) - base)
    return float(min(offs.max() - du, du - offs.min()))


def check_normal_rays(sol: BernoulliSolution, core: RadialDomain,
                      directions: str = "normal") -> CheckResult:
    """Cast a ray from every boundary node and test hull intersection.

    ``directions="tangent"`` rotates the rays by 90 degrees (negative
    control; the check is then expected to FAIL).
    """
    dom = sol.domain
    if dom.dimension != 2:
        raise ValueError("normal-ray check is d=2 only")
    hull = convex_hull(boundary_points(core))
    pts = boundary_points(dom)
    normals = inward_normals(dom)
    if directions == "tangent":
        normals = np.column_stack([-normals[:, 1], normals[:, 0]])
    elif directions != "normal":
        raise ValueError("directions must be 'normal' or 'tangent'")
    hits = 0
    min_margin = math.inf
    for p, u in zip(pts, normals):
        interval = ray_hull_interval(p, u, hull)
        margin = ray_hull_angular_margin(p, u, hull)
        min_margin = min(min_margin, margin)
        if interval is not None:
            hits += 1
    frac = hits / pts.shape[0]
    status = PASS if frac == 1.0 else FAIL
    return CheckResult(f"normal-rays-{directions}", status, min_margin, 0.0, 1.0,
                       {"fraction_hit": frac, "lam": sol.lam,
                        "n_rays": int(pts.shape[0])})


# ---------------------------------------------------------------------------
# moving-plane geometry
# ---------------------------------------------------------------------------

OMEGA_TOUCH = "omega-touch"
OMEGA_PERP = "omega-perpendicular"
CORE_TOUCH = "core-touch"
CORE_PERP = "core-perpendicular"


@dataclass(frozen=True)
class MovingPlaneProfile:
    t1: float
    t0: float
    contact: tuple
    details: dict


def _reflected_cap_slack(dom: RadialDomain, e: np.ndarray, t: float):
    """Radial slack of the reflected boundary cap inside ``dom``.

    Returns (slacks, plane_dist) for boundary samples with projection > t;
    empty arrays if the cap holds no samples.  Positive slack = strictly
    inside after reflection.
    """
    pts = boundary_points(dom)
    proj = pts @ e
    cap = proj > t + 1e-15
    if not np.any(cap):
        return np.array([]), np.array([])
    refl = reflect(pts[cap], Halfspace(e, t))
    offsets = refl - dom.center
    dist = np.linalg.norm(offsets, axis=1)
    if dom.is_ball():
        rho = np.full(dist.shape, dom.radii[0])
    else:
        from .geometry import _interp_radius_batch
        rho = _interp_radius_batch(dom, offsets)
    return rho - dist, proj[cap] - t


def moving_plane_profile(omega: RadialDomain, core: RadialDomain,
                         e) -> MovingPlaneProfile:
    """Critical offsets of the moving-plane construction along direction e.

    t1 is the largest boundary projection of omega; t0 the smallest offset
    from which every halfplane cut above it has both reflected caps (of
    omega and of the core) contained in their sets.  The contact at t0 is
    classified as touching (binding away from the plane) or perpendicular
    (binding at the plane), for each body.
    """
    e = np.asarray(e, dtype=float).reshape(-1)
    e = e / np.linalg.norm(e)
    proj = boundary_points(omega) @ e
    t1 = float(np.max(proj))
    t_min = float(np.min(proj))
    scale = max(abs(t1), abs(t_min), float(np.max(omega.radii)))
    inc_tol = 1e-9 * scale

    def cap_ok(dom, t):
        slack, _ = _reflected_cap_slack(dom, e, t)
        return bool(slack.size == 0 or np.min(slack) >= -inc_tol)

    def ok_all(t):
        for mu in np.linspace(t, t1, 33):
            if not (cap_ok(omega, mu) and cap_ok(core, mu)):
                return False
        return True

    lo, hi = t_min - scale, t1
    if ok_all(lo):
        hi = lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok_all(mid):
            hi = mid
        else:
            lo = mid
    t0 = hi
    contact = []
    bind_tol = 1e-5 * scale
    plane_tol = 1e-3 * scale
    detail = {}
    for name, dom, tags in (("omega", omega, (OMEGA_PERP, OMEGA_TOUCH)),
                            ("core", core, (CORE_PERP, CORE_TOUCH))):
        slack, plane_dist = _reflected_cap_slack(dom, e, t0)
        if slack.size == 0:
            continue
        binding = slack <= np.minimum(np.min(slack) + bind_tol, bind_tol)
        detail[f"{name}_min_slack"] = float(np.min(slack))
        if not np.any(binding):
            continue
        if np.any(plane_dist[binding] <= plane_tol):
            contact.append(tags[0])
        if np.any(plane_dist[binding] > plane_tol):
            contact.append(tags[1])
    return MovingPlaneProfile(t1, float(t0), tuple(contact), detail)


def check_reflection_positivity(omega: RadialDomain, core: RadialDomain,
                                H: Halfspace, cfg, n_points: int = 20) -> CheckResult:
    """Paired-walk estimate of v = u o Q - u at sample points in the cap.

    Uses common random numbers for the paired starts.  FAIL if some sample is
    negative beyond 3 sigma; PASS if the pooled mean is positive beyond 3
    sigma; INCONCLUSIVE when the pooled margin straddles zero (symmetric
    configurations).
    """
    profile = moving_plane_profile(omega, core, H.e)
    if not (profile.t0 < H.t < profile.t1):
        raise ValueError(
            f"halfspace offset {H.t} outside the admissible range "
            f"({profile.t0:.6g}, {profile.t1:.6g})")
    # fixed candidate fan, independent of the domain grid resolution
    fractions = np.linspace(0.2, 0.975, 12)
    angles = 2.0 * np.pi * np.arange(128) / 128
    fan = np.column_stack([np.cos(angles), np.sin(angles)])
    rho_max = float(np.max(omega.radii))
    cands = (omega.center[None, None, :]
             + fractions[:, None, None] * rho_max
             * fan[None, :, :]).reshape(-1, omega.dimension)
    proj = cands @ H.e
    refl = reflect(cands, H)
    good = ((proj > H.t + 1e-12)
            & contains_many(omega, cands)
            & ~contains_many(core, cands, closed=True)
            & contains_many(omega, refl)
            & ~contains_many(core, refl, closed=True))
    samples = cands[good]
    if samples.shape[0] < 6:
        raise RuntimeError("could not place enough sample points in the cap")
    n_points = min(n_points, samples.shape[0])
    samples = samples[:n_points]
    values = np.empty(n_points)
    sigmas = np.empty(n_points)
    for k, x in enumerate(samples):
        seed = derive_seed(cfg.base_seed, "reflection", k)
        starts = np.broadcast_to(x, (cfg.n_walks, x.shape[0]))
        lab_x, _, _ = run_walks(np.ascontiguousarray(starts), omega, core, cfg, seed)
        qx = reflect(x, H)
        starts_q = np.broadcast_to(qx, (cfg.n_walks, qx.shape[0]))
        lab_q, _, _ = run_walks(np.ascontiguousarray(starts_q), omega, core, cfg, seed)
        diff = (lab_q == 1).astype(float) - (lab_x == 1).astype(float)
        values[k] = diff.mean()
        sigmas[k] = diff.std(ddof=1) / math.sqrt(cfg.n_walks)
    point_margin = float(np.min(values + 3.0 * sigmas))
    pooled = float(values.mean())
    pooled_sigma = float(np.sqrt(np.sum(sigmas ** 2)) / n_points)
    details = {"pooled_mean": pooled, "pooled_sigma": pooled_sigma,
               "min_point_margin": point_margin, "t": H.t,
               "t0": profile.t0, "t1": profile.t1}
    if point_margin < 0.0:
        return CheckResult("reflection-positivity", FAIL, point_margin,
                           pooled_sigma, 0.0, details)
    if pooled > 3.0 * pooled_sigma:
        return CheckResult("reflection-positivity", PASS,
                           pooled - 3.0 * pooled_sigma, pooled_sigma, 0.0,
                           details)
    return CheckResult("reflection-positivity", INCONCLUSIVE,
                       pooled - 3.0 * pooled_sigma, pooled_sigma, 0.0, details)


def check_interior_positivity(omega: RadialDomain, core: RadialDomain, cfg,
                              n_points: int = 8) -> CheckResult:
    """The potential is strictly positive everywhere between core and boundary.

    Spot-checks the Monte Carlo estimate at a fan of interior points; PASS
    iff every mean is positive (a zero mean at finite walk budget leaves the
    margin at zero and the verdict INCONCLUSIVE).
    """
    angles = 2.0 * np.pi * np.arange(n_points) / n_points
    fan = np.column_stack([np.cos(angles), np.sin(angles)])
    cands = omega.center[None, :] + 0.93 * _fan_radii(omega, fan)[:, None] * fan
    means = []
    worst = math.inf
    for k, x in enumerate(cands):
        if not (contains_many(omega, x[None, :])[0]
                and not contains_many(core, x[None, :], closed=True)[0]):
            continue
        est = harmonic_value(x, omega, core, cfg, stream_tag=("hopf", k))
        means.append(est.mean)
        worst = min(worst, est.mean)
    if not means:
        raise RuntimeError("no interior spot-check points available")
    status = PASS if worst > 0.0 else INCONCLUSIVE
    return CheckResult("interior-positivity", status, worst, 0.0, 0.0,
                       {"n_points": len(means), "means": means})


def _fan_radii(dom: RadialDomain, fan: np.ndarray) -> np.ndarray:
    from .geometry import _interp_radius_batch
    return _interp_radius_batch(dom, fan)


def check_moving_plane(omega: RadialDomain, core: RadialDomain,
                       n_directions: int = 8) -> CheckResult:
    """t0 < t1 along a fan of directions; records profiles."""
    profiles = []
    worst = math.inf
    for k in range(n_directions):
        ang = 2.0 * math.pi * k / n_directions
        e = np.array([math.cos(ang), math.sin(ang)])
        prof = moving_plane_profile(omega, core, e)
        worst = min(worst, prof.t1 - prof.t0)
        profiles.append({"angle": ang, "t0": prof.t0, "t1": prof.t1,
                         "contact": list(prof.contact)})
    return CheckResult("moving-plane", PASS if worst > 0.0 else FAIL,
                       worst, 0.0, 0.0, {"profiles": profiles})


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def run_verification(core: RadialDomain, lambdas, solver_cfg: SolverConfig,
                     suites=("all",), threads: int = 1,
                     experiment_id: str | None = None) -> VerificationReport:
    """Solve the family and run the requested suites; fully deterministic.

    ``threads`` caps concurrent per-lambda solves; results are identical for
    any value because every solve owns its random streams.
    """
    lambdas = tuple(sorted(float(l) for l in lambdas))
    wanted = set(SUITES) if "all" in suites else set(suites)
    unknown = wanted - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {lam: pool.submit(solve, core, lam, solver_cfg)
                       for lam in lambdas}
            sols = {lam: futures[lam].result() for lam in lambdas}
    else:
        sols = {lam: solve(core, lam, solver_cfg) for lam in lambdas}
    ordered = [sols[lam] for lam in lambdas]
    checks = []
    if "monotonicity" in wanted and len(ordered) >= 1:
        checks.append(check_monotonicity(ordered))
    if "triangle" in wanted:
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                checks.append(check_triangle_bound(ordered[i], ordered[j]))
    if "distance" in wanted:
        for s in ordered:
            checks.append(check_distance_bounds(s, core))
    if "rays" in wanted and core.dimension == 2:
        for s in ordered:
            checks.append(check_normal_rays(s, core))
    if "moving-plane" in wanted and core.dimension == 2:
        for s in ordered:
            checks.append(check_moving_plane(s.domain, core))
    if "hopf" in wanted and core.dimension == 2:
        # the smallest lam has the roomiest solve region for cap sampling
        widest = ordered[0]
        checks.append(check_interior_positivity(widest.domain, core,
                                                solver_cfg.walk))
        prof = moving_plane_profile(widest.domain, core, np.array([1.0, 0.0]))
        t = prof.t0 + 0.25 * (prof.t1 - prof.t0)
        checks.append(check_reflection_positivity(
            widest.domain, core, Halfspace(np.array([1.0, 0.0]), t),
            solver_cfg.walk))
    if experiment_id is None:
        tags = [int(l * 1e9) for l in lambdas]
        exp_hash = derive_seed(solver_cfg.walk.base_seed, "experiment", *tags)
        experiment_id = f"verify-{exp_hash:016x}"
    return VerificationReport(
        experiment_id=experiment_id,
        core=domain_to_dict(core),
        lambdas=lambdas,
        solutions=tuple(solution_to_dict(s) for s in ordered),
        checks=tuple(checks),
        seed=solver_cfg.walk.base_seed,
        config=asdict(solver_cfg),
    )


def report_csv(report: VerificationReport) -> str:
    """Summary table: lambda, dist, g_exact, upper, triangle, residual."""
    core = domain_from_dict(report.core)
    sols = [solution_from_dict(s) for s in report.solutions]
    r_core = interior_ball_radius(core)
    lines = ["lambda,dist,g_exact,upper,triangle_vs_mid,residual"]
    mid = sols[len(sols) // 2]
    for s in sols:
        dist = boundary_distance(s.domain, core)
        lower, upper = distance_bracket(s.lam, r_core, core.dimension)
        tri = triangle_metric(s.domain, mid.domain)
        lines.append(",".join(f"{v:.12g}" for v in
                              (s.lam, dist, lower, upper, tri, s.residual)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG rendering (deterministic, no plotting dependency)
# ---------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def render_family_svg(core: RadialDomain, solutions, rays: bool = False,
                      width: int = 640) -> str:
    """Draw the core, the free-boundary family, and optional normal rays."""
    if core.dimension != 2:
        raise ValueError("SVG rendering is d=2 only")
    polys = [boundary_points(core)] + [boundary_points(s.domain) for s in solutions]
    allpts = np.vstack(polys)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = float(np.max(hi - lo)) or 1.0
    pad = 0.06 * span
    lo -= pad
    span += 2 * pad
    scale = width / span

    def xy(p):
        return ((p[0] - lo[0]) * scale, width - (p[1] - lo[1]) * scale)

    def poly_str(poly):
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in (xy(p) for p in poly))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{width}" viewBox="0 0 {width} {width}">',
             f'<polygon points="{poly_str(polys[0])}" fill="#d9d9d9" '
             f'stroke="#555555" stroke-width="1"/>']
    hull = convex_hull(boundary_points(core))
    for idx, s in enumerate(solutions):
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(f'<polygon points="{poly_str(polys[idx + 1])}" '
                     f'fill="none" stroke="{color}" stroke-width="1.5"/>')
        if rays:
            pts = boundary_points(s.domain)
            normals = inward_normals(s.domain)
            for p, u in zip(pts[:: max(1, pts.shape[0] // 32)],
                            normals[:: max(1, pts.shape[0] // 32)]):
                interval = ray_hull_interval(p, u, hull)
                t_end = interval[0] if interval else 0.25 * span
                x1, y1 = xy(p)
                x2, y2 = xy(p + t_end * u)
                parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" '
                             f'x2="{x2:.2f}" y2="{y2:.2f}" '
                             f'stroke="{color}" stroke-width="0.6"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
