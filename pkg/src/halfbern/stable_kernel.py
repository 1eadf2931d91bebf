"""First-exit law of the isotropic 1-stable process and the walk-on-spheres
Monte Carlo walker for functions harmonic under the half Laplacian.

The exit distribution from a ball is the explicit Poisson kernel

    P(x, y) = c (rho^2 - |x - y0|^2)^(1/2) (|y - y0|^2 - rho^2)^(-1/2) |x - y|^(-d),
    c = Gamma(d/2) pi^(-1 - d/2),

supported on the complement of the closed ball.  Started at the center, the
radial exit CDF is F(s) = (2/pi) arccos(rho/s), which is inverted exactly for
sampling.  The process exits a domain by a jump (it lands strictly outside
almost surely), so the walker needs no boundary shell: a walk ends the first
time a jump lands in the core set or outside the outer domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import RadialDomain, contains, contains_many, distance_to_sampled_boundary
from .rng import derive_seed, step_uniforms

IN_K = "IN_K"
OUTSIDE_OMEGA = "OUTSIDE_OMEGA"
CENSORED = "CENSORED"

_LABELS = {1: IN_K, 2: OUTSIDE_OMEGA, 3: CENSORED}


@dataclass(frozen=True)
class WalkConfig:
    """Monte Carlo run parameters.

    ``shrink_factor`` is the fraction of the distance to the boundary used as
    the walk-on-spheres ball radius.  ``parallel_chunk`` only controls batch
    memory; results are bit-identical for any value.
    """

    n_walks: int = 10_000
    max_steps: int = 10_000
    shrink_factor: float = 0.95
    base_seed: int = 42
    parallel_chunk: int = 65_536

    def __post_init__(self):
        if not (0.0 < self.shrink_factor < 1.0):
            raise ValueError("shrink_factor must lie in (0, 1)")
        if self.n_walks < 1:
            raise ValueError("n_walks must be at least 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.parallel_chunk < 1:
            raise ValueError("parallel_chunk must be at least 1")


@dataclass(frozen=True)
class WalkOutcome:
    """Terminal record of a single walk."""

    terminal: np.ndarray
    label: str
    steps: int


@dataclass(frozen=True)
class HarmonicEstimate:
    """Monte Carlo estimate of the capacitary potential at a point."""

    mean: float
    stderr: float
    n_walks: int
    n_censored: int


# ---------------------------------------------------------------------------
# Poisson kernel and exit sampling
# ---------------------------------------------------------------------------

def poisson_kernel(rho: float, y0, x, y) -> float:
    """Exit density at y for the process started at x inside B_rho(y0)."""
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    d = y0.shape[0]
    rx = float(np.linalg.norm(x - y0))
    ry = float(np.linalg.norm(y - y0))
    if rx >= rho:
        raise ValueError("x must lie in the open ball")
    if ry <= rho:
        raise ValueError("y must lie outside the closed ball")
    c = math.gamma(d / 2.0) * math.pi ** (-1.0 - d / 2.0)
    dist = float(np.linalg.norm(x - y))
    return c * math.sqrt(rho * rho - rx * rx) / math.sqrt(ry * ry - rho * rho) / dist ** d


def exit_radius_cdf(s, rho: float):
    """Radial CDF of the exit position from the ball center: (2/pi) arccos(rho/s)."""
    s = np.asarray(s, dtype=float)
    return (2.0 / math.pi) * np.arccos(np.clip(rho / s, -1.0, 1.0))


def exit_radius_pdf(s, rho: float):
    """Radial exit density (2/pi) rho / (s sqrt(s^2 - rho^2)) for s > rho."""
    s = np.asarray(s, dtype=float)
    return (2.0 / math.pi) * rho / (s * np.sqrt(s * s - rho * rho))


def sample_exit_radii(rho: float, u):
    """Invert the radial CDF: s = rho / cos(pi u / 2) for u in [0, 1)."""
    u = np.asarray(u, dtype=float)
    return rho / np.cos(0.5 * math.pi * u)


def _unit_directions(d: int, u1, u2=None) -> np.ndarray:
    """Map uniforms to uniform directions on the sphere (vectorized)."""
    u1 = np.atleast_1d(np.asarray(u1, dtype=float))
    if d == 1:
        return np.where(u1 < 0.5, 1.0, -1.0)[:, None]
    if d == 2:
        ang = 2.0 * math.pi * u1
        return np.column_stack([np.cos(ang), np.sin(ang)])
    z = 2.0 * u1 - 1.0
    az = 2.0 * math.pi * np.asarray(u2, dtype=float)
    s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.column_stack([s * np.cos(az), s * np.sin(az), z])


def sample_exit(rho: float, y0, rng: np.random.Generator, size: int | None = None):
    """Sample exit positions from B_rho(y0) for the walk started at the center.

    ``rng`` is a numpy Generator; the walker itself uses counter-based
    uniforms instead, so this entry point is for validation and demos.
    """
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    d = y0.shape[0]
    m = 1 if size is None else int(size)
    s = sample_exit_radii(rho, rng.random(m))
    dirs = _unit_directions(d, rng.random(m), rng.random(m) if d == 3 else None)
    pts = y0[None, :] + s[:, None] * dirs
    return pts[0] if size is None else pts


def kernel_normalization(rho: float, y0, x, epsrel: float = 1e-9) -> float:
    """Integral of the exit density over the complement of the ball.

    Computed by adaptive quadrature after substituting s = rho cosh(v), which
    removes the inverse-square-root edge singularity.  Supports d in {1, 2};
    the value should equal 1 for any interior x.
    """
    y0 = np.asarray(y0, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = y0.shape[0]
    v_max = 60.0  # integrand ~ e^(-v); the truncated tail is below 1e-20
    if d == 1:
        def piece(sign):
            def f(v):
                y = y0 + np.array([sign * rho * math.cosh(v)])
                return poisson_kernel(rho, y0, x, y) * rho * math.sinh(v)
            val, _ = integrate.quad(f, 0.0, v_max, epsabs=1e-12, epsrel=epsrel,
                                    limit=200)
            return val
        return piece(1.0) + piece(-1.0)
    if d == 2:
        def f(v, phi):
            s = rho * math.cosh(v)
            y = y0 + s * np.array([math.cos(phi), math.sin(phi)])
            return poisson_kernel(rho, y0, x, y) * s * rho * math.sinh(v)
        val, _ = integrate.dblquad(f, 0.0, 2.0 * math.pi, 0.0, v_max,
                                   epsabs=1e-10, epsrel=epsrel)
        return val
    raise ValueError("kernel_normalization supports d in {1, 2}")


# ---------------------------------------------------------------------------
# the walker
# ---------------------------------------------------------------------------

def _in_solve_region(omega: RadialDomain, core: RadialDomain, x) -> bool:
    return contains(omega, x) and not contains(core, x, closed=True)


def run_walks(starts: np.ndarray, omega: RadialDomain, core: RadialDomain,
              cfg: WalkConfig, stream_seed: int,
              walk_indices: np.ndarray | None = None):
    """Run one walk per start point; fully deterministic and chunk-invariant.

    ``starts`` has shape (m, d) and must lie in omega minus the closed core.
    Walk i consumes uniforms addressed by (stream_seed, walk_indices[i], step,
    slot) only, so any partition of the batch reproduces identical outcomes.

    Returns (labels, terminals, steps) with labels encoded 1=IN_K,
    2=OUTSIDE_OMEGA, 3=CENSORED.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    m, d = starts.shape
    if walk_indices is None:
        walk_indices = np.arange(m, dtype=np.uint64)
    else:
        walk_indices = np.asarray(walk_indices, dtype=np.uint64)
    labels = np.zeros(m, dtype=np.int8)
    terminals = starts.copy()
    steps = np.zeros(m, dtype=np.int32)
    for lo in range(0, m, cfg.parallel_chunk):
        hi = min(m, lo + cfg.parallel_chunk)
        _run_chunk(starts[lo:hi], omega, core, cfg, stream_seed,
                   walk_indices[lo:hi], labels[lo:hi], terminals[lo:hi],
                   steps[lo:hi])
    return labels, terminals, steps


def _run_chunk(starts, omega, core, cfg, stream_seed, walk_indices,
               labels, terminals, steps):
    d = starts.shape[1]
    pos = starts.copy()
    alive = np.arange(starts.shape[0])
    for step in range(1, cfg.max_steps + 1):
        if alive.size == 0:
            return
        cur = pos[alive]
        d_omega = distance_to_sampled_boundary(omega, cur)
        d_core = distance_to_sampled_boundary(core, cur)
        gap = np.minimum(d_omega, d_core)
        if np.any(gap <= 0.0):
            # walker sits on the boundary within float resolution; classify
            # by the nearer side instead of letting a zero-radius ball stall
            on_edge = gap <= 0.0
            edge_ids = alive[on_edge]
            labels[edge_ids] = np.where(d_core[on_edge] <= d_omega[on_edge],
                                        1, 2).astype(np.int8)
            terminals[edge_ids] = cur[on_edge]
            steps[edge_ids] = step - 1
            alive = alive[~on_edge]
            if alive.size == 0:
                return
            cur = pos[alive]
            gap = gap[~on_edge]
        radius = cfg.shrink_factor * gap
        u = step_uniforms(stream_seed, walk_indices[alive], step, 3 if d == 3 else 2)
        jump = sample_exit_radii(radius, u[0])
        cur = cur + jump[:, None] * _unit_directions(d, u[1], u[2] if d == 3 else None)
        pos[alive] = cur
        hit_core = contains_many(core, cur, closed=True)
        escaped = ~hit_core & ~contains_many(omega, cur)
        done = hit_core | escaped
        done_ids = alive[done]
        labels[done_ids] = np.where(hit_core[done], 1, 2).astype(np.int8)
        terminals[done_ids] = cur[done]
        steps[done_ids] = step
        alive = alive[~done]
    labels[alive] = 3
    terminals[alive] = pos[alive]
    steps[alive] = cfg.max_steps


def walk(start, omega: RadialDomain, core: RadialDomain, cfg: WalkConfig,
         walk_index: int, stream_tag=0) -> WalkOutcome:
    """Single walk; deterministic given (cfg.base_seed, walk_index)."""
    start = np.asarray(start, dtype=float).reshape(-1)
    if not _in_solve_region(omega, core, start):
        raise ValueError("walk start must lie in omega minus the closed core")
    seed = derive_seed(cfg.base_seed, "walk", *_tag_tuple(stream_tag))
    lab, term, st = run_walks(start[None, :], omega, core, cfg, seed,
                              np.array([walk_index], dtype=np.uint64))
    return WalkOutcome(term[0], _LABELS[int(lab[0])], int(st[0]))


def walk_trace(start, omega: RadialDomain, core: RadialDomain, cfg: WalkConfig,
               walk_index: int, stream_tag=0) -> np.ndarray:
    """Positions visited by one walk (start included), for debugging dumps."""
    start = np.asarray(start, dtype=float).reshape(-1)
    if not _in_solve_region(omega, core, start):
        raise ValueError("walk start must lie in omega minus the closed core")
    seed = derive_seed(cfg.base_seed, "walk", *_tag_tuple(stream_tag))
    d = start.shape[0]
    path = [start.copy()]
    pos = start[None, :].copy()
    idx = np.array([walk_index], dtype=np.uint64)
    for step in range(1, cfg.max_steps + 1):
        gap = min(float(distance_to_sampled_boundary(omega, pos)[0]),
                  float(distance_to_sampled_boundary(core, pos)[0]))
        radius = cfg.shrink_factor * gap
        u = step_uniforms(seed, idx, step, 3 if d == 3 else 2)
        jump = sample_exit_radii(radius, u[0])
        pos = pos + jump[:, None] * _unit_directions(d, u[1], u[2] if d == 3 else None)
        path.append(pos[0].copy())
        if contains_many(core, pos, closed=True)[0] or not contains_many(omega, pos)[0]:
            break
    return np.array(path)


def traces_csv(traces: dict[int, np.ndarray]) -> str:
    """Render walk traces as CSV text: walk_index, step, x_1..x_d."""
    lines = []
    d = next(iter(traces.values())).shape[1] if traces else 0
    lines.append(",".join(["walk_index", "step"] + [f"x_{k + 1}" for k in range(d)]))
    for widx in sorted(traces):
        for step, p in enumerate(traces[widx]):
            lines.append(",".join([str(widx), str(step)] + [f"{v:.12g}" for v in p]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# potential estimation
# ---------------------------------------------------------------------------

def _tag_tuple(stream_tag) -> tuple:
    return tuple(stream_tag) if isinstance(stream_tag, (tuple, list)) else (stream_tag,)


def harmonic_value(x, omega: RadialDomain, core: RadialDomain, cfg: WalkConfig,
                   stream_tag=0) -> HarmonicEstimate:
    """Estimate u(x): the probability that the walk from x ends in the core.

    Censored walks count as 0 and are reported separately.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if not _in_solve_region(omega, core, x):
        raise ValueError("evaluation point must lie in omega minus the closed core")
    seed = derive_seed(cfg.base_seed, "harmonic", *_tag_tuple(stream_tag))
    starts = np.broadcast_to(x, (cfg.n_walks, x.shape[0]))
    labels, _, _ = run_walks(np.ascontiguousarray(starts), omega, core, cfg, seed)
    return _estimate_from_labels(labels)


def _estimate_from_labels(labels: np.ndarray) -> HarmonicEstimate:
    n = labels.shape[0]
    hits = int(np.sum(labels == 1))
    censored = int(np.sum(labels == 3))
    p = hits / n
    var = p * (1.0 - p) * n / (n - 1) if n > 1 else 0.0
    return HarmonicEstimate(p, math.sqrt(var / n), n, censored)


def harmonic_values(points: np.ndarray, omega: RadialDomain, core: RadialDomain,
                    cfg: WalkConfig, stream_seed: int) -> list[HarmonicEstimate]:
    """Estimates at several points, cfg.n_walks walks each, one batch run.

    Point i's walks use global indices i*n_walks .. (i+1)*n_walks - 1; results
    are independent of batching.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = points.shape[0]
    n = cfg.n_walks
    starts = np.repeat(points, n, axis=0)
    labels, _, _ = run_walks(starts, omega, core, cfg, stream_seed)
    grid = labels.reshape(m, n)
    hits = np.sum(grid == 1, axis=1)
    censored = np.sum(grid == 3, axis=1)
    p = hits / n
    var = p * (1.0 - p) * (n / (n - 1)) if n > 1 else np.zeros(m)
    se = np.sqrt(var / n)
    return [HarmonicEstimate(float(p[i]), float(se[i]), n, int(censored[i]))
            for i in range(m)]
