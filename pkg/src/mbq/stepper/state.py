"""Simulation state and per-step report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FieldValueError, StructuralError
from ..field import BC, Grid, ScalarField, VectorField2
from ..field import stencils as st
from .projection import wall_masks

BC_THETA = ("dirichlet", "adiabatic")
BC_B = ("dirichlet", "conducting")

# relative divergence tolerance for a completed step
DIV_TOL = 1e-8
DIV_EPS = 1e-300


def theta_mode(bc_theta: str) -> BC:
    return BC.DIRICHLET if bc_theta == "dirichlet" else BC.NEUMANN


def b_mode(bc_b: str) -> BC | None:
    # conducting walls fix only the normal component, so the field as a
    # whole carries no uniform trace condition
    return BC.DIRICHLET if bc_b == "dirichlet" else None


def free_masks(n: int, bc_theta: str, bc_b: str) -> dict[str, np.ndarray]:
    """Boolean masks of the nodes each unknown evolves on."""
    th = np.ones((n + 1, n + 1), dtype=bool)
    if bc_theta == "dirichlet":
        th[[0, -1], :] = False
        th[:, [0, -1]] = False
    u1, u2 = wall_masks(n, "dirichlet")
    b1, b2 = wall_masks(n, "dirichlet" if bc_b == "dirichlet" else "conducting")
    return {"theta": th, "u1": u1, "u2": u2, "b1": b1, "b2": b2}


def cell_divergence_inf(v: VectorField2) -> float:
    return float(np.abs(st.div_cell(v.x.values, v.y.values, v.grid.h)).max())


def divergence_bound(v: VectorField2) -> float:
    vmax = max(float(np.abs(v.x.values).max()), float(np.abs(v.y.values).max()))
    return DIV_TOL * (vmax / v.grid.h + DIV_EPS)


@dataclass(frozen=True)
class State:
    """Temperature, velocity, magnetic field and pressure at time ``t``.

    Divergences are measured with the cell-centered stencil the projection
    enforces.  The pressure is a node field with zero trapezoid mean.
    """

    theta: ScalarField
    u: VectorField2
    b_field: VectorField2
    pressure: ScalarField
    t: float = 0.0
    bc_theta: str = "dirichlet"
    bc_b: str = "dirichlet"

    def __post_init__(self):
        if self.bc_theta not in BC_THETA:
            raise StructuralError(f"bc_theta must be one of {BC_THETA}, got {self.bc_theta!r}")
        if self.bc_b not in BC_B:
            raise StructuralError(f"bc_b must be one of {BC_B}, got {self.bc_b!r}")
        g = self.theta.grid
        for f in (self.u, self.b_field, self.pressure):
            if f.grid != g:
                raise StructuralError("state fields live on different grids")
        if self.theta.bc is not theta_mode(self.bc_theta):
            raise StructuralError(f"theta boundary mode does not match bc_theta={self.bc_theta!r}")
        if self.u.bc is not BC.DIRICHLET:
            raise StructuralError("velocity must carry the dirichlet_zero mode")
        if self.b_field.bc is not b_mode(self.bc_b):
            raise StructuralError(f"magnetic field boundary mode does not match bc_b={self.bc_b!r}")
        if self.bc_b == "conducting":
            b1, b2 = self.b_field.x.values, self.b_field.y.values
            if np.any(b1[[0, -1], :] != 0.0) or np.any(b2[:, [0, -1]] != 0.0):
                raise FieldValueError("conducting walls need B.n = 0 on the boundary")
        if not np.isfinite(self.t):
            raise FieldValueError("state time is not finite")

    @property
    def grid(self) -> Grid:
        return self.theta.grid

    @classmethod
    def zeros(cls, grid: Grid, bc_theta: str = "dirichlet", bc_b: str = "dirichlet", t: float = 0.0) -> State:
        return cls(
            ScalarField.zeros(grid, theta_mode(bc_theta)),
            VectorField2.zeros(grid, BC.DIRICHLET),
            VectorField2.zeros(grid, b_mode(bc_b)),
            ScalarField.zeros(grid),
            t,
            bc_theta,
            bc_b,
        )

    @classmethod
    def from_arrays(
        cls,
        grid: Grid,
        theta,
        u1,
        u2,
        b1,
        b2,
        pressure=None,
        t: float = 0.0,
        bc_theta: str = "dirichlet",
        bc_b: str = "dirichlet",
    ) -> State:
        """Build a state, zeroing every value on a node that the walls fix."""
        m = free_masks(grid.n, bc_theta, bc_b)
        arrs = {k: np.where(m[k], np.asarray(v, dtype=float), 0.0) for k, v in
                zip(("theta", "u1", "u2", "b1", "b2"), (theta, u1, u2, b1, b2))}
        p = np.zeros(grid.shape) if pressure is None else np.asarray(pressure, dtype=float)
        p = p - np.sum(grid.weights * p)
        return cls(
            ScalarField(grid, arrs["theta"], theta_mode(bc_theta)),
            VectorField2.from_arrays(grid, arrs["u1"], arrs["u2"], BC.DIRICHLET),
            VectorField2.from_arrays(grid, arrs["b1"], arrs["b2"], b_mode(bc_b)),
            ScalarField(grid, p),
            t,
            bc_theta,
            bc_b,
        )

    def arrays(self) -> tuple[np.ndarray, ...]:
        """(theta, u1, u2, b1, b2) value arrays."""
        return (
            self.theta.values,
            self.u.x.values,
            self.u.y.values,
            self.b_field.x.values,
            self.b_field.y.values,
        )

    def energy(self) -> float:
        """E = ||theta||^2 + ||u||^2 + ||B||^2 in trapezoid quadrature."""
        w = self.grid.weights
        return float(sum(np.sum(w * a * a) for a in self.arrays()))

    def divergence_ok(self) -> bool:
        return all(cell_divergence_inf(v) <= divergence_bound(v) for v in (self.u, self.b_field))


@dataclass(frozen=True)
class StepReport:
    """What happened during one Heun step.

    ``dissipation`` is the stage average of the exact discrete dissipation
    rate, so ``E_new - E_old + 2*dt*dissipation`` is the time-integration
    defect.  ``dissipation_h1`` is the stage average of
    ``|theta|_1^2 + |u|_1^2 + ||J||^2``, the quantity the coefficient lower
    bound controls the dissipation by.
    """

    dt_used: float
    cfl_ratio: float
    div_u_before: float
    div_u_after: float
    div_b_before: float
    div_b_after: float
    coeff_in_range: bool
    dissipation: float
    dissipation_h1: float
