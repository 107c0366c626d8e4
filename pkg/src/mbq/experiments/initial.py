"""Initial conditions built from clamped stream functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..field import Grid, ScalarField, perp_grad
from ..stepper import State, projector


def stream_function(x, y):
    """sin^2(pi x) sin^2(pi y): vanishes with its gradient on the walls."""
    return np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2


def projected_perp_grad(grid: Grid, psi: ScalarField, wall: str = "dirichlet") -> tuple[np.ndarray, np.ndarray]:
    """Nodal perp_grad of ``psi`` made exactly cell-divergence free."""
    v = perp_grad(psi)
    w1, w2, _ = projector(grid.n, wall).project(v.x.values, v.y.values)
    return w1, w2


@dataclass(frozen=True)
class InitialCondition:
    """theta = a_theta sin(pi x) sin(pi y); u, B = a perp_grad(stream_function).

    The sampled perp-gradients are projected so the data start exactly
    divergence free in the cell sense the stepper maintains.
    """

    name: str = "standard"
    amplitudes: tuple[float, float, float] = (1.0, 0.5, 0.5)

    def build(
        self,
        grid: Grid,
        bc_theta: str = "dirichlet",
        bc_b: str = "dirichlet",
        theta_perturbation: float = 0.0,
    ) -> State:
        if self.name != "standard":
            raise ParameterError(f"unknown initial condition {self.name!r}")
        a_th, a_u, a_b = self.amplitudes
        X, Y = grid.mesh
        theta = a_th * np.sin(np.pi * X) * np.sin(np.pi * Y)
        if theta_perturbation:
            theta = theta + theta_perturbation * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)
        psi = ScalarField.sample(grid, stream_function)
        u1, u2 = projected_perp_grad(grid, psi)
        b1, b2 = projected_perp_grad(grid, psi, "dirichlet" if bc_b == "dirichlet" else "conducting")
        return State.from_arrays(
            grid, theta, a_u * u1, a_u * u2, a_b * b1, a_b * b2, bc_theta=bc_theta, bc_b=bc_b
        )
