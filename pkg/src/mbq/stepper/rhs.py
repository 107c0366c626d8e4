"""Right-hand sides of the temperature, momentum and induction equations.

The array kernel :func:`rhs_arrays` evaluates all five scalar right-hand
sides at once, batching the advection stencils over stacked components.
Every term is written so that its contribution to the energy pairing
``<rhs, field>`` is either exactly antisymmetric (advection, Lorentz
force against stretching, buoyancy against stratification) or exactly
minus a sum of squares (diffusion), so the discrete energy balance carries
no spurious production.

Magnetic diffusion uses the cell current ``J = curl_cell(B)`` and its exact
adjoint: ``M = W^-1 (Dy^T, -Dx^T)(sigma_c J)``.  With conducting walls the
condition ``J = 0`` is natural for this form and is not imposed by ghost
values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..coeffs import CoefficientModel
from ..errors import CoefficientBoundError
from ..field import BC, ScalarField, VectorField2
from ..field import stencils as st
from .state import State, b_mode, free_masks, theta_mode


@dataclass(frozen=True)
class Layout:
    n: int
    h: float
    masks: np.ndarray  # (5, n+1, n+1) bool: theta, u1, u2, b1, b2
    fmasks: np.ndarray  # masks as 0.0 / 1.0
    winv: np.ndarray  # inverse trapezoid weights without the h**2 factor


@lru_cache(maxsize=32)
def layout(n: int, bc_theta: str, bc_b: str) -> Layout:
    m = free_masks(n, bc_theta, bc_b)
    masks = np.stack([m[k] for k in ("theta", "u1", "u2", "b1", "b2")])
    return Layout(n, 1.0 / n, masks, masks.astype(float), 1.0 / st.node_weights(n))


def coefficient_arrays(model: CoefficientModel, theta: np.ndarray) -> tuple[np.ndarray, ...]:
    out = []
    for name in ("kappa", "mu", "sigma"):
        c = model[name](theta)
        if np.any(c <= 0.0):
            k = np.unravel_index(np.argmin(c), c.shape)
            raise CoefficientBoundError(f"{name} = {c[k]:.6g} <= 0 at theta = {theta[k]:.6g}")
        out.append(c)
    return tuple(out)


def rhs_arrays(x: np.ndarray, model: CoefficientModel, lay: Layout, want_dissipation: bool = False):
    """Right-hand sides for the stacked state ``x = [theta, u1, u2, b1, b2]``.

    Returns ``(f, q, d)``: the masked right-hand sides, the exact discrete
    dissipation rate ``q = -<f, x>`` (None unless requested) and the
    coercive part ``|theta|_1^2 + |u|_1^2 + ||J||^2`` (likewise).
    """
    h = lay.h
    theta, u1, u2, b1, b2 = x
    kappa, mu, sigma = coefficient_arrays(model, theta)

    adv_u = st.advect_skew(u1, u2, x, h)
    adv_b = st.advect_skew(b1, b2, x[[3, 4, 1, 2]], h)

    f = np.empty_like(x)
    diff_th = st.flux_diffusion(kappa, theta, h)
    diff_u = st.flux_diffusion(mu, x[1:3], h)
    f[0] = diff_th - adv_u[0] - u2
    f[1:3] = diff_u - adv_u[1:3] + adv_b[0:2]
    f[2] += theta
    sigma_c = st.cell_average(sigma)
    j = st.curl_cell(b1, b2, h)
    sj = sigma_c * j
    f[3] = st.dy_cell_T(sj, h) * lay.winv - adv_u[3] + adv_b[2]
    f[4] = -st.dx_cell_T(sj, h) * lay.winv - adv_u[4] + adv_b[3]
    f *= lay.fmasks

    if not want_dissipation:
        return f, None, None
    hh = h * h
    q = st.face_dissipation(kappa, theta, h) + st.face_dissipation(mu, x[1:3], h) + float(np.sum(sj * j)) * hh
    d = st.face_dissipation(None, x[0:3], h) + float(np.sum(j * j)) * hh
    return f, q, d


def _state_rhs(s: State, model: CoefficientModel) -> np.ndarray:
    lay = layout(s.grid.n, s.bc_theta, s.bc_b)
    f, _, _ = rhs_arrays(np.stack(s.arrays()), model, lay)
    return f


def rhs_theta(s: State, model: CoefficientModel) -> ScalarField:
    """-advect(u, theta) + div(kappa(theta) grad theta) - u2, on the free nodes."""
    return ScalarField(s.grid, _state_rhs(s, model)[0], theta_mode(s.bc_theta))


def rhs_velocity(s: State, model: CoefficientModel) -> VectorField2:
    """Pre-projection momentum right-hand side (no pressure gradient)."""
    f = _state_rhs(s, model)
    return VectorField2.from_arrays(s.grid, f[1], f[2], BC.DIRICHLET)


def rhs_magnetic(s: State, model: CoefficientModel) -> VectorField2:
    """Induction right-hand side: transport, resistive diffusion and stretching."""
    f = _state_rhs(s, model)
    return VectorField2.from_arrays(s.grid, f[3], f[4], b_mode(s.bc_b))


def dissipation(s: State, model: CoefficientModel) -> float:
    """Exact discrete dissipation rate, equal to minus the summed energy pairings."""
    lay = layout(s.grid.n, s.bc_theta, s.bc_b)
    return rhs_arrays(np.stack(s.arrays()), model, lay, want_dissipation=True)[1]
