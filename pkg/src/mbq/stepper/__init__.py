"""Heun time integration with exact projection for u and B."""

from .integrate import cfl_max_dt, clean_magnetic, project_velocity, step
from .projection import Projector, projector, wall_masks
from .rhs import dissipation, rhs_magnetic, rhs_theta, rhs_velocity
from .state import State, StepReport, cell_divergence_inf, divergence_bound, free_masks

__all__ = [
    "Projector",
    "State",
    "StepReport",
    "cell_divergence_inf",
    "cfl_max_dt",
    "clean_magnetic",
    "dissipation",
    "divergence_bound",
    "free_masks",
    "project_velocity",
    "projector",
    "rhs_magnetic",
    "rhs_theta",
    "rhs_velocity",
    "step",
    "wall_masks",
]
