"""Discrete differential operators on :class:`ScalarField` / :class:`VectorField2`."""

from __future__ import annotations

import numpy as np

from ..errors import CoefficientBoundError, StructuralError
from . import stencils as st
from .fields import BC, ScalarField, VectorField2


def _check_same_grid(*fields):
    grids = {f.grid for f in fields}
    if len(grids) != 1:
        raise StructuralError("operands live on different grids")


def _interior_only(f: ScalarField, out: np.ndarray) -> np.ndarray:
    if f.bc is not BC.NEUMANN:
        out[f.grid.boundary] = 0.0
    return out


def grad(f: ScalarField) -> VectorField2:
    h = f.grid.h
    return VectorField2.from_arrays(f.grid, st.d_node(f.values, h, 0), st.d_node(f.values, h, 1))


def div(v: VectorField2) -> ScalarField:
    h = v.grid.h
    return ScalarField(v.grid, st.d_node(v.x.values, h, 0) + st.d_node(v.y.values, h, 1))


def perp_grad(f: ScalarField) -> VectorField2:
    """(-d2 f, d1 f); divergence-free under the centered stencils."""
    h = f.grid.h
    return VectorField2.from_arrays(f.grid, -st.d_node(f.values, h, 1), st.d_node(f.values, h, 0))


def curl2d(v: VectorField2) -> ScalarField:
    """Scalar curl d1 v2 - d2 v1 (the current J when applied to B)."""
    h = v.grid.h
    return ScalarField(v.grid, st.d_node(v.y.values, h, 0) - st.d_node(v.x.values, h, 1))


def laplacian(f: ScalarField, wide: bool = False) -> ScalarField:
    """Discrete Laplacian.

    The default is the compact 5-point stencil: Dirichlet (and
    unconstrained) fields get it on interior nodes with zeros on the
    boundary, Neumann fields get ghost-reflected boundary rows too.

    ``wide=True`` returns d1(d1 f) + d2(d2 f) built from the centered
    first-derivative stencils on every node (spacing 2h in the interior);
    this is exactly what ``curl2d(perp_grad(f))`` produces.
    """
    h = f.grid.h
    if wide:
        out = st.d_node(st.d_node(f.values, h, 0), h, 0) + st.d_node(st.d_node(f.values, h, 1), h, 1)
        return ScalarField(f.grid, out)
    out = st.flux_diffusion(np.ones(f.grid.shape), f.values, h)
    return ScalarField(f.grid, _interior_only(f, out))


def div_coeff_grad(c: ScalarField, f: ScalarField) -> ScalarField:
    """div(c grad f) in flux form, face coefficient (c_i + c_{i+1}) / 2."""
    _check_same_grid(c, f)
    if np.any(c.values <= 0.0):
        i, j = np.unravel_index(np.argmin(c.values), c.values.shape)
        raise CoefficientBoundError(f"diffusion coefficient {c.values[i, j]:.6g} <= 0 at node ({i}, {j})")
    out = st.flux_diffusion(c.values, f.values, f.grid.h)
    return ScalarField(f.grid, _interior_only(f, out))


def advect(a: VectorField2, v):
    """Skew-symmetric advection of a scalar or vector field by ``a``.

    ``<advect(a, v), w> == trilinear_skew(a, v, w)`` and the form is
    antisymmetric in ``(v, w)`` for every ``a``.  At interior nodes the
    values approximate ``a . grad v`` to second order when ``a`` is
    divergence free.
    """
    h = a.grid.h
    if isinstance(v, VectorField2):
        _check_same_grid(a, v)
        return VectorField2.from_arrays(
            a.grid,
            st.advect_skew(a.x.values, a.y.values, v.x.values, h),
            st.advect_skew(a.x.values, a.y.values, v.y.values, h),
        )
    _check_same_grid(a, v)
    return ScalarField(a.grid, st.advect_skew(a.x.values, a.y.values, v.values, h))


def convective(a: VectorField2, v):
    """Plain a . D v with the advection gradient (no skew symmetrization)."""
    h = a.grid.h

    def one(s):
        d1, d2 = st.d_adv(s.values, h)
        return a.x.values * d1 + a.y.values * d2

    if isinstance(v, VectorField2):
        return VectorField2.from_arrays(a.grid, one(v.x), one(v.y))
    return ScalarField(a.grid, one(v))


def trilinear_skew(a: VectorField2, v, w) -> float:
    """1/2 [<a.grad v, w> - <a.grad w, v>]."""
    from .norms import inner_l2

    return 0.5 * (inner_l2(convective(a, v), w) - inner_l2(convective(a, w), v))
