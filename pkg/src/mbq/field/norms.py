"""Quadrature norms with composite trapezoid weights (h**2 per interior node)."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ParameterError, StructuralError
from . import stencils as st
from .fields import ScalarField, VectorField2


def _arrays(f):
    if isinstance(f, VectorField2):
        return (f.x.values, f.y.values)
    return (f.values,)


def inner_l2(f, g) -> float:
    if f.grid != g.grid:
        raise StructuralError("operands live on different grids")
    fa, ga = _arrays(f), _arrays(g)
    if len(fa) != len(ga):
        raise StructuralError("inner product of a scalar with a vector")
    w = f.grid.weights
    return float(sum(np.sum(w * a * b) for a, b in zip(fa, ga)))


def norm_l2(f) -> float:
    return math.sqrt(max(inner_l2(f, f), 0.0))


def norm_lp(f, p: float) -> float:
    """L^p norm of the pointwise magnitude; ``p=math.inf`` gives the grid max."""
    if p < 1:
        raise ParameterError(f"L^p norm needs p >= 1, got {p}")
    mag = np.sqrt(sum(a * a for a in _arrays(f)))
    if math.isinf(p):
        return float(mag.max())
    return float(np.sum(f.grid.weights * mag**p)) ** (1.0 / p)


def seminorm_h1(f) -> float:
    """||grad f||_{L^2} from edge differences, wall edges at half weight.

    This is the seminorm paired with the compact Laplacian:
    ``-<laplacian(f), f> = seminorm_h1(f)**2`` for Dirichlet and Neumann
    fields alike.
    """
    h = f.grid.h
    return math.sqrt(sum(st.face_dissipation(None, a, h) for a in _arrays(f)))


def norm_h2_discrete(f) -> float:
    """||laplacian f||_{L^2}, componentwise for vectors."""
    from .ops import laplacian

    comps = f.components if isinstance(f, VectorField2) else (f,)
    return math.sqrt(sum(norm_l2(laplacian(c)) ** 2 for c in comps))


def mean(f: ScalarField) -> float:
    return float(np.sum(f.grid.weights * f.values))
