"""Shared fixtures.

The acceptance-grade solves are expensive (minutes each), so they are
session-scoped and shared by every criterion that needs the same family.
"""

import numpy as np
import pytest

from halfbern.geometry import ball_domain, ellipse_domain
from halfbern.solver import SolverConfig, solve
from halfbern.stable_kernel import WalkConfig

ACCEPT_SEED = 42


def acceptance_config(seed: int = ACCEPT_SEED) -> SolverConfig:
    return SolverConfig(walk=WalkConfig(n_walks=32768, base_seed=seed),
                        t_ratio=0.5, max_outer_iters=20)


@pytest.fixture(scope="session")
def unit_ball_core():
    return ball_domain([0.0, 0.0], 1.0, n=64)


@pytest.fixture(scope="session")
def family_solutions(unit_ball_core):
    """Solutions for lam in {0.5, 1, 2} on the unit-ball core."""
    cfg = acceptance_config()
    return {lam: solve(unit_ball_core, lam, cfg) for lam in (0.5, 1.0, 2.0)}


@pytest.fixture(scope="session")
def scaled_solution():
    """Solution for the doubled core at lam / sqrt(2)."""
    cfg = acceptance_config()
    core = ball_domain([0.0, 0.0], 2.0, n=64)
    return solve(core, 1.0 / np.sqrt(2.0), cfg)


@pytest.fixture(scope="session")
def ellipse_core():
    return ellipse_domain([0.0, 0.0], 2.0, 1.0, n=64)


@pytest.fixture(scope="session")
def ellipse_solution(ellipse_core):
    cfg = acceptance_config()
    return solve(ellipse_core, 1.0, cfg)
