"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from mbq.coeffs import Coefficient, CoefficientModel
from mbq.experiments import InitialCondition
from mbq.field import BC, Grid, ScalarField, VectorField2
from mbq.stepper import State, projector


def smooth_random(grid: Grid, rng: np.random.Generator, modes: int = 3, bc=BC.DIRICHLET) -> ScalarField:
    """Random combination of low sine modes (zero on the walls)."""
    x, y = grid.mesh
    v = np.zeros(grid.shape)
    for k in range(1, modes + 1):
        for m in range(1, modes + 1):
            v += rng.standard_normal() / (k * m) * np.sin(k * np.pi * x) * np.sin(m * np.pi * y)
    if bc is BC.DIRICHLET:
        v[grid.boundary] = 0.0
    return ScalarField(grid, v, bc)


def random_field(grid: Grid, rng: np.random.Generator, bc=None) -> ScalarField:
    v = rng.standard_normal(grid.shape)
    if bc is BC.DIRICHLET:
        v[grid.boundary] = 0.0
    return ScalarField(grid, v, bc)


def random_vector(grid: Grid, rng: np.random.Generator, bc=None) -> VectorField2:
    return VectorField2(random_field(grid, rng, bc), random_field(grid, rng, bc))


def random_state(n: int, rng: np.random.Generator, bc_theta="dirichlet", bc_b="dirichlet", scale=1.0) -> State:
    """Random projected state: free nodes random, u and B cell-divergence free."""
    g = Grid(n)
    a = [scale * rng.standard_normal(g.shape) for _ in range(5)]
    u1, u2, _ = projector(n, "dirichlet").project(a[1], a[2])
    kind = "dirichlet" if bc_b == "dirichlet" else "conducting"
    b1, b2, _ = projector(n, kind).project(a[3], a[4])
    return State.from_arrays(g, a[0], u1, u2, b1, b2, bc_theta=bc_theta, bc_b=bc_b)


def standard_state(n: int, bc_theta="dirichlet", bc_b="dirichlet", amps=(1.0, 0.5, 0.5)) -> State:
    return InitialCondition("standard", amps).build(Grid(n), bc_theta, bc_b)


POLY_MODEL = CoefficientModel(kappa=Coefficient.poly(1.0, 0.0, 1.0), mu=Coefficient.poly(1.2, 0.2),
                              sigma=Coefficient.poly(1.5, 0.3))
BC_PAIRS = [(bt, bb) for bt in ("dirichlet", "adiabatic") for bb in ("dirichlet", "conducting")]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
