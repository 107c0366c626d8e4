"""Heun time stepping with exact projection after each stage."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..coeffs import CoefficientModel
from ..errors import BlowUpError, CFLViolation, ParameterError
from ..field import BC, ScalarField, VectorField2
from ..field import stencils as st
from .projection import projector
from .rhs import coefficient_arrays, layout, rhs_arrays
from .state import State, StepReport

CFL_SAFETY = 0.4
CFL_EPS = 1e-12

Forcing = Callable[[float], Sequence[np.ndarray]]


def _wall_kind(v: VectorField2) -> str:
    return "dirichlet" if v.bc is BC.DIRICHLET else "conducting"


def _node_pressure(phi: np.ndarray, grid) -> np.ndarray:
    p = st.cell_to_node(phi)
    return p - np.sum(grid.weights * p)


def project_velocity(u_star: VectorField2, dt: float) -> tuple[VectorField2, ScalarField]:
    """Remove the gradient part of ``u_star``; returns (u, pressure update).

    The pressure update ``p`` satisfies ``u = u_star - dt * G p`` with the
    cell-to-node gradient ``G``; it is reported on nodes with zero mean.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    g = u_star.grid
    w1, w2, phi = projector(g.n, "dirichlet").project(u_star.x.values, u_star.y.values)
    u = VectorField2.from_arrays(g, w1, w2, BC.DIRICHLET)
    return u, ScalarField(g, _node_pressure(phi / dt, g))


def clean_magnetic(b_star: VectorField2) -> VectorField2:
    """Same projection for B; the wall kind follows the field's boundary mode."""
    g = b_star.grid
    w1, w2, _ = projector(g.n, _wall_kind(b_star)).project(b_star.x.values, b_star.y.values)
    return VectorField2.from_arrays(g, w1, w2, b_star.bc)


def _cfl_from_arrays(x: np.ndarray, model: CoefficientModel, h: float) -> float:
    cmax = max(float(c.max()) for c in coefficient_arrays(model, x[0]))
    vmax = max(float(np.sqrt(x[1] ** 2 + x[2] ** 2).max()), float(np.sqrt(x[3] ** 2 + x[4] ** 2).max()))
    return CFL_SAFETY * min(h * h / (4.0 * cmax), h / (vmax + CFL_EPS))


def cfl_max_dt(s: State, model: CoefficientModel) -> float:
    """0.4 * min(h^2 / (4 max coefficient), h / (max |u|, |B|))."""
    return _cfl_from_arrays(np.stack(s.arrays()), model, s.grid.h)


def _dump(x: np.ndarray, t: float, dt: float, stage: str) -> dict:
    names = ("theta", "u1", "u2", "b1", "b2")
    return {
        "t": t,
        "dt": dt,
        "stage": stage,
        "nonfinite": {k: int(np.count_nonzero(~np.isfinite(a))) for k, a in zip(names, x)},
        "max_abs": {k: float(np.nanmax(np.abs(a))) if np.isfinite(a).any() else math.nan for k, a in zip(names, x)},
    }


def _check_finite(x: np.ndarray, t: float, dt: float, stage: str):
    if not np.all(np.isfinite(x)):
        raise BlowUpError(f"non-finite values after {stage} at t={t:.6g}", _dump(x, t, dt, stage))


def _project_pair(x: np.ndarray, pu, pb):
    u1, u2, phi = pu.project(x[1], x[2])
    b1, b2, _ = pb.project(x[3], x[4])
    return np.stack([x[0], u1, u2, b1, b2]), phi


def _forcing(forcing: Forcing | None, t: float, lay) -> np.ndarray | float:
    if forcing is None:
        return 0.0
    f = np.stack([np.asarray(a, dtype=float) for a in forcing(t)])
    return np.where(lay.masks, f, 0.0)


def step(
    s: State,
    dt: float,
    model: CoefficientModel,
    forcing: Forcing | None = None,
) -> tuple[State, StepReport]:
    """Advance one Heun step of size ``dt``.

    ``forcing(t)`` returns ``(f_theta, f_u1, f_u2, f_b1, f_b2)`` arrays
    added to the right-hand sides; it is evaluated at ``t`` and ``t + dt``.
    Velocity and magnetic field are projected after each stage.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive and finite, got {dt}")
    g = s.grid
    h = g.h
    lay = layout(g.n, s.bc_theta, s.bc_b)
    pu = projector(g.n, "dirichlet")
    pb = projector(g.n, "dirichlet" if s.bc_b == "dirichlet" else "conducting")

    x0 = np.stack(s.arrays())
    limit = _cfl_from_arrays(x0, model, h)
    if dt > limit * (1.0 + CFL_EPS):
        raise CFLViolation(f"dt={dt:.6g} exceeds the stability bound {limit:.6g}")

    # overflow shows up as non-finite stage values, reported by _check_finite
    with np.errstate(over="ignore", invalid="ignore"):
        f0, q0, d0 = rhs_arrays(x0, model, lay, want_dissipation=True)
        f0 = f0 + _forcing(forcing, s.t, lay)
        xs = x0 + dt * f0
    _check_finite(xs, s.t, dt, "stage 1")
    x1, phi1 = _project_pair(xs, pu, pb)

    with np.errstate(over="ignore", invalid="ignore"):
        f1, q1, d1 = rhs_arrays(x1, model, lay, want_dissipation=True)
        f1 = f1 + _forcing(forcing, s.t + dt, lay)
        xs = 0.5 * (x0 + x1 + dt * f1)
    _check_finite(xs, s.t, dt, "stage 2")
    div_u_before = float(np.abs(st.div_cell(xs[1], xs[2], h)).max())
    div_b_before = float(np.abs(st.div_cell(xs[3], xs[4], h)).max())
    x2, phi2 = _project_pair(xs, pu, pb)

    pressure = _node_pressure((0.5 * phi1 + phi2) / dt, g)
    new = State.from_arrays(g, *x2, pressure=pressure, t=s.t + dt, bc_theta=s.bc_theta, bc_b=s.bc_b)
    lo, hi = model.theta_range
    report = StepReport(
        dt_used=dt,
        cfl_ratio=dt / limit,
        div_u_before=div_u_before,
        div_u_after=float(np.abs(st.div_cell(x2[1], x2[2], h)).max()),
        div_b_before=div_b_before,
        div_b_after=float(np.abs(st.div_cell(x2[3], x2[4], h)).max()),
        coeff_in_range=bool(x2[0].min() >= lo and x2[0].max() <= hi),
        dissipation=0.5 * (q0 + q1),
        dissipation_h1=0.5 * (d0 + d1),
    )
    return new, report
