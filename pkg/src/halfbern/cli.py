"""Command-line interface: solve, annulus-derivative, bounds, metric, verify, plot.

Exit codes: 0 success (verify: all checks PASS or INCONCLUSIVE), 1 a check
FAILed, 2 usage or configuration error.  All randomness is controlled by
--seed (default 42, overridable by the HALFBERN_SEED environment variable);
every output file embeds a provenance header with the package version, the
seed, and a hash of the effective configuration, and reruns with the same
arguments are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .annulus import (AnnulusSpec, derivative_lower_bound,
                      derivative_upper_bound, form1_quadrature)
from .bounds import g_estimate, g_exact
from .geometry import (RadialDomain, ball_domain, domain_from_dict,
                       ellipse_domain)
from .metrics import triangle_metric
from .solver import SolverConfig, solution_to_dict, solve
from .stable_kernel import WalkConfig
from .verify import render_family_svg, report_csv, run_verification
from .solver import solution_from_dict


def _default_seed() -> int:
    env = os.environ.get("HALFBERN_SEED")
    return int(env) if env else 42


def _config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True).encode("utf-8")
    return hashlib.sha256(canon).hexdigest()[:12]


def _provenance(seed: int, config: dict) -> dict:
    return {"version": __version__, "seed": seed,
            "config_hash": _config_hash(config)}


def _csv_header(seed: int, config: dict) -> str:
    p = _provenance(seed, config)
    return (f"# halfbern {p['version']} seed={p['seed']} "
            f"config={p['config_hash']}\n")


def load_domain_spec(path: str) -> RadialDomain:
    """Load a domain spec file: ball, ellipse, or raw radial JSON."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    kind = data.get("type", "radial")
    if kind == "ball":
        return ball_domain(data["center"], data["radius"], data.get("n"))
    if kind == "ellipse":
        return ellipse_domain(data["center"], data["a"], data["b"], data.get("n"))
    if kind == "radial":
        return domain_from_dict(data)
    raise ValueError(f"unknown domain spec type {kind!r}")


def load_solver_config(path: str | None, seed: int) -> SolverConfig:
    """Solver configuration from JSON with the CLI seed injected."""
    if path is None:
        return SolverConfig(walk=WalkConfig(base_seed=seed))
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    walk_data = dict(data.pop("walk", {}))
    walk_data["base_seed"] = seed
    return SolverConfig(walk=WalkConfig(**walk_data), **data)


def _write_or_print(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    core = load_domain_spec(args.k_spec)
    if args.lam <= 0:
        raise ValueError("--lambda must be positive")
    cfg = load_solver_config(args.config, args.seed)
    sol = solve(core, args.lam, cfg)
    payload = solution_to_dict(sol)
    payload["provenance"] = _provenance(args.seed, payload["config"])
    _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    args.out)
    return 0


def cmd_annulus_derivative(args) -> int:
    if args.r <= 0 or args.R <= args.r:
        raise ValueError("need 0 < r < R")
    spec = AnnulusSpec([0.0] * args.d, args.r, args.R, args.d)
    lower = derivative_lower_bound(spec)
    upper = derivative_upper_bound(spec)
    quad = form1_quadrature(spec)
    config = {"d": args.d, "r": args.r, "R": args.R}
    text = (_csv_header(args.seed, config)
            + "d,r,R,lower,quadrature,upper\n"
            + f"{args.d},{args.r:.12g},{args.R:.12g},"
            + f"{lower:.12g},{quad:.12g},{upper:.12g}\n")
    _write_or_print(text, args.out)
    return 0


def _parse_grid(spec: str):
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise ValueError(f"bad --lambda-grid {spec!r}; expected a:b:n") from exc
    if a <= 0 or b <= a or n < 2:
        raise ValueError("grid needs 0 < a < b and n >= 2")
    return np.geomspace(a, b, n)


def cmd_bounds(args) -> int:
    lams = _parse_grid(args.lambda_grid)
    if args.rk <= 0:
        raise ValueError("--rk must be positive")
    config = {"d": args.d, "rk": args.rk, "lambda_grid": args.lambda_grid}
    lines = [_csv_header(args.seed, config).rstrip("\n"),
             "lambda,g_estimate,g_exact,upper"]
    for lam in lams:
        est = g_estimate(lam, args.rk, args.d) if args.d >= 2 else math.nan
        lines.append(f"{lam:.12g},{est:.12g},{g_exact(lam, args.rk, args.d):.12g},"
                     f"{1.0 / lam ** 2:.12g}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_metric(args) -> int:
    dom_a = load_domain_spec(args.a)
    dom_b = load_domain_spec(args.b)
    x0 = None
    if args.x0 is not None:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    value = triangle_metric(dom_a, dom_b, x0)
    sys.stdout.write(f"{value:.12g}\n")
    return 0


def cmd_verify(args) -> int:
    core = load_domain_spec(args.k_spec)
    lambdas = [float(v) for v in args.lambdas.split(",")]
    if any(l <= 0 for l in lambdas):
        raise ValueError("--lambdas must be positive")
    cfg = load_solver_config(args.config, args.seed)
    report = run_verification(core, lambdas, cfg, suites=(args.suite,),
                              threads=args.threads)
    payload = report.to_dict()
    payload["provenance"] = _provenance(args.seed, payload["config"])
    _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    args.out)
    if args.csv:
        _write_or_print(_csv_header(args.seed, payload["config"])
                        + report_csv(report), args.csv)
    if args.svg:
        sols = [solution_from_dict(s) for s in report.solutions]
        _write_or_print(render_family_svg(core, sols, rays=True), args.svg)
    for check in report.checks:
        sys.stdout.write(f"{check.name}: {check.status} "
                         f"(margin {check.margin:.4g})\n")
    return 0 if report.all_pass() else 1


def cmd_plot(args) -> int:
    core = load_domain_spec(args.k_spec)
    sols = []
    for path in args.solutions:
        with open(path, "r", encoding="utf-8") as fh:
            sols.append(solution_from_dict(json.load(fh)))
    sols.sort(key=lambda s: s.lam)
    _write_or_print(render_family_svg(core, sols, rays=args.rays), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfbern",
        description="Half-Laplacian exterior Bernoulli free boundary laboratory")
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="base random seed (env HALFBERN_SEED, default 42)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap for independent runs; results "
                             "do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the free boundary for one lambda")
    p.add_argument("--k-spec", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("annulus-derivative",
                       help="closed-form bracket and quadrature for the "
                            "annulus barrier derivative")
    p.add_argument("--d", type=int, choices=(1, 2), required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_annulus_derivative)

    p = sub.add_parser("bounds", help="distance-bound curves over a lambda grid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rk", type=float, required=True)
    p.add_argument("--lambda-grid", required=True, help="a:b:n geometric grid")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("metric", help="scaling metric between two domains")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--x0", default=None, help="comma-separated center")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("verify", help="run verification suites on a family")
    p.add_argument("--suite", choices=("monotonicity", "triangle", "distance",
                                       "rays", "moving-plane", "hopf", "all"),
                   default="all")
    p.add_argument("--k-spec", required=True)
    p.add_argument("--lambdas", required=True, help="comma-separated values")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render a family figure as SVG")
    p.add_argument("--k-spec", required=True)
    p.add_argument("--solutions", nargs="+", required=True)
    p.add_argument("--rays", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, TypeError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
