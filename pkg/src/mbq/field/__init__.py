"""Grid, field containers, discrete operators, norms and Poisson solvers."""

from .fields import BC, ScalarField, VectorField2
from .grid import Grid
from .norms import inner_l2, mean, norm_h2_discrete, norm_l2, norm_lp, seminorm_h1
from .ops import (
    advect,
    convective,
    curl2d,
    div,
    div_coeff_grad,
    grad,
    laplacian,
    perp_grad,
    trilinear_skew,
)
from .poisson import poisson_solve, remove_mean

__all__ = [
    "BC",
    "Grid",
    "ScalarField",
    "VectorField2",
    "advect",
    "convective",
    "curl2d",
    "div",
    "div_coeff_grad",
    "grad",
    "inner_l2",
    "laplacian",
    "mean",
    "norm_h2_discrete",
    "norm_l2",
    "norm_lp",
    "perp_grad",
    "poisson_solve",
    "remove_mean",
    "seminorm_h1",
    "trilinear_skew",
]
