"""Norms, dissipation budgets, inequality checks and decay-rate fits.

A :class:`DiagnosticsRecord` holds one row of the time-series CSV.  Per
field energies and the velocity L^p norms used by
:func:`lp_inequality_check` ride along in ``extras``, which the CSV does
not carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import coeffs
from .coeffs import CoefficientModel
from .errors import InsufficientDataError, ParameterError, SolverFailure
from .field import (
    BC,
    Grid,
    ScalarField,
    advect,
    inner_l2,
    laplacian,
    mean,
    norm_h2_discrete,
    norm_l2,
    norm_lp,
    poisson_solve,
    seminorm_h1,
)
from .field import stencils as st
from .stepper.rhs import layout, rhs_arrays
from .stepper.state import State

CSV_FIELDS = (
    "t",
    "E_l2",
    "D_h1",
    "H2",
    "lp2_theta",
    "lp4_theta",
    "lpinf_theta",
    "theta_hat_h1",
    "J_l2",
    "mean_theta",
    "div_u_inf",
    "div_b_inf",
    "budget_res",
    "cross_res",
    "coeff_flag",
)

TRUNCATE_BELOW = 1e-28
MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One diagnostics sample; squared functionals are stored squared.

    ``coeff_flag`` is 1 when theta has left the certified range of the
    coefficient model, 0 otherwise.
    """

    t: float
    E_l2: float
    D_h1: float
    H2: float
    lp2_theta: float
    lp4_theta: float
    lpinf_theta: float
    theta_hat_h1: float
    J_l2: float
    mean_theta: float
    div_u_inf: float
    div_b_inf: float
    budget_res: float
    cross_res: float
    coeff_flag: int
    extras: dict | None = field(default=None, compare=False)

    def csv_values(self) -> tuple:
        return tuple(getattr(self, k) for k in CSV_FIELDS)


@dataclass(frozen=True)
class DecayFit:
    alpha_emp: float
    r_squared: float
    window: tuple[float, float]
    samples: int


@dataclass(frozen=True)
class LpReport:
    p: float
    passed: bool
    worst_margin: float
    margins: tuple[float, ...]
    times: tuple[float, ...]


def current_l2(s: State) -> float:
    """||J||^2 with the cell-centered current."""
    h = s.grid.h
    j = st.curl_cell(s.b_field.x.values, s.b_field.y.values, h)
    return float(np.sum(j * j)) * h * h


def record(
    s: State,
    model: CoefficientModel,
    prev: DiagnosticsRecord | None = None,
    dt: float | None = None,
    dissipated: float | None = None,
) -> DiagnosticsRecord:
    """Evaluate every diagnostic on ``s``.

    The budget residual is ``E - prev.E + dissipated``, where ``dissipated``
    is the time integral of ``2 * dissipation`` since ``prev`` as
    accumulated by the stepper.  Without it, ``2 * dt * dissipation(s)`` is
    used, a one-sided estimate good to O(dt^2).  With no ``prev`` the
    residual is 0.
    """
    g = s.grid
    x = np.stack(s.arrays())
    f, q, _ = rhs_arrays(x, model, layout(g.n, s.bc_theta, s.bc_b), want_dissipation=True)
    w = g.weights
    pairing = float(np.sum(w * f * x))
    energy = s.energy()

    if prev is None:
        budget = 0.0
    elif dissipated is not None:
        budget = energy - prev.E_l2 + dissipated
    elif dt is not None:
        budget = energy - prev.E_l2 + 2.0 * dt * q
    else:
        raise ParameterError("budget residual needs dt or the accumulated dissipation")

    th = s.theta
    return DiagnosticsRecord(
        t=s.t,
        E_l2=energy,
        D_h1=seminorm_h1(th) ** 2 + seminorm_h1(s.u) ** 2 + seminorm_h1(s.b_field) ** 2,
        H2=norm_h2_discrete(th) ** 2 + norm_h2_discrete(s.u) ** 2 + norm_h2_discrete(s.b_field) ** 2,
        lp2_theta=norm_lp(th, 2),
        lp4_theta=norm_lp(th, 4),
        lpinf_theta=norm_lp(th, math.inf),
        theta_hat_h1=seminorm_h1(coeffs.theta_hat(model, th)),
        J_l2=current_l2(s),
        mean_theta=mean(th),
        div_u_inf=float(np.abs(st.div_cell(x[1], x[2], g.h)).max()),
        div_b_inf=float(np.abs(st.div_cell(x[3], x[4], g.h)).max()),
        budget_res=budget,
        cross_res=pairing + q,
        coeff_flag=0 if coeffs.in_range(model, th) else 1,
        extras={
            "E_theta": norm_l2(th) ** 2,
            "E_u": norm_l2(s.u) ** 2,
            "E_b": norm_l2(s.b_field) ** 2,
            "lp2_u": norm_lp(s.u, 2),
            "lp4_u": norm_lp(s.u, 4),
            "lpinf_u": norm_lp(s.u, math.inf),
        },
    )


def lambda1(grid: Grid, rtol: float = 1e-10, max_iter: int = 500) -> float:
    """Smallest eigenvalue of the Dirichlet compact Laplacian by inverse iteration."""
    v = ScalarField.sample(grid, lambda x, y: x * (1 - x) * y * (1 - y), BC.DIRICHLET)
    v = v * (1.0 / norm_l2(v))
    lam_old = math.inf
    for _ in range(max_iter):
        w = poisson_solve(v, BC.DIRICHLET)
        lam = -inner_l2(v, w) / inner_l2(w, w)
        v = w * (1.0 / norm_l2(w))
        if abs(lam - lam_old) <= rtol * abs(lam):
            return lam
        lam_old = lam
    raise SolverFailure(f"inverse iteration did not reach rtol={rtol} in {max_iter} steps")


def alpha_theory(c0: float, lambda1_h: float) -> float:
    """Certified rate: E(t) <= E(0) exp(-2 alpha t) with alpha = lambda1_h / c0."""
    if not c0 >= 1:
        raise ParameterError(f"c0 must be >= 1, got {c0}")
    if not lambda1_h > 0:
        raise ParameterError(f"lambda1_h must be positive, got {lambda1_h}")
    return lambda1_h / c0


def decay_fit(
    series: Sequence[DiagnosticsRecord],
    functional: str,
    window: tuple[float, float],
) -> DecayFit:
    """Least-squares fit of log(functional) against t; alpha_emp = -slope / 2.

    ``functional`` names a record attribute or an ``extras`` key.  The
    window is cut at the first value below 1e-28.
    """
    t0, t1 = window
    ts, vs = [], []
    for r in series:
        if t0 <= r.t <= t1:
            v = getattr(r, functional) if functional in CSV_FIELDS else r.extras[functional]
            if not v >= TRUNCATE_BELOW:
                break
            ts.append(r.t)
            vs.append(v)
    if len(ts) < MIN_FIT_SAMPLES:
        raise InsufficientDataError(
            f"{functional}: {len(ts)} samples in window {window}, need {MIN_FIT_SAMPLES}"
        )
    t = np.array(ts)
    y = np.log(np.array(vs))
    slope, icept = np.polyfit(t, y, 1)
    resid = y - (slope * t + icept)
    sst = float(np.sum((y - y.mean()) ** 2))
    # a flat series is fitted exactly; guard the ratio of rounding errors
    flat = sst <= len(y) * (1e-14 * max(1.0, float(np.abs(y).max()))) ** 2
    r2 = 1.0 if flat else 1.0 - float(np.sum(resid**2)) / sst
    return DecayFit(-slope / 2.0, min(max(r2, 0.0), 1.0), (float(t[0]), float(t[-1])), len(ts))


def _lp_theta(r: DiagnosticsRecord, p: float) -> float:
    if math.isinf(p):
        return r.lpinf_theta
    return {2: r.lp2_theta, 4: r.lp4_theta}[p]


def lp_inequality_check(series: Sequence[DiagnosticsRecord], p: float, slack: float = 0.01) -> LpReport:
    """Check ||theta(t)||_p <= (1 + slack)(||theta_0||_p + int_0^t ||u||_p).

    The time integral is the trapezoid rule over the recorded samples.
    Supported exponents are 2, 4 and ``math.inf``.
    """
    if p not in (2, 4) and not math.isinf(p):
        raise ParameterError(f"lp_inequality_check supports p in {{2, 4, inf}}, got {p}")
    if not series:
        raise InsufficientDataError("empty series")
    if any(r.extras is None for r in series):
        raise ParameterError("records carry no velocity L^p norms")
    key = "lpinf_u" if math.isinf(p) else f"lp{p}_u"
    th0 = _lp_theta(series[0], p)
    integral = 0.0
    margins = []
    for k, r in enumerate(series):
        if k:
            a = series[k - 1]
            integral += 0.5 * (r.t - a.t) * (a.extras[key] + r.extras[key])
        margins.append((1.0 + slack) * (th0 + integral) - _lp_theta(r, p))
    worst = min(margins)
    return LpReport(p, worst >= 0.0, worst, tuple(margins), tuple(r.t for r in series))


def _theta_hat_terms(s: State, model: CoefficientModel) -> tuple[ScalarField, np.ndarray]:
    th_hat = coeffs.theta_hat(model, s.theta)
    kappa = coeffs.eval(model, "kappa", s.theta).values
    spatial = (
        advect(s.u, th_hat).values
        - kappa * laplacian(th_hat).values
        + kappa * s.u.y.values
    )
    return th_hat, spatial


def theta_hat_residual(s: State, s_next: State, dt: float, model: CoefficientModel) -> float:
    """L2 residual of the transformed temperature equation between two states.

    The spatial terms ``u.grad th - kappa(theta) lap th + kappa(theta) u2``
    are averaged over the two time levels, so the time error is O(dt^2).
    Only nodes where theta evolves enter the norm.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    h0, a0 = _theta_hat_terms(s, model)
    h1, a1 = _theta_hat_terms(s_next, model)
    r = (h1.values - h0.values) / dt + 0.5 * (a0 + a1)
    if s.theta.bc is BC.DIRICHLET:
        r[s.grid.boundary] = 0.0
    return norm_l2(ScalarField(s.grid, r))


def record_from_csv_row(values: Sequence[float]) -> DiagnosticsRecord:
    kw = dict(zip(CSV_FIELDS, values))
    kw["coeff_flag"] = int(kw["coeff_flag"])
    return DiagnosticsRecord(**kw)


__all__ = [
    "CSV_FIELDS",
    "DecayFit",
    "DiagnosticsRecord",
    "LpReport",
    "alpha_theory",
    "current_l2",
    "decay_fit",
    "lambda1",
    "lp_inequality_check",
    "record",
    "record_from_csv_row",
    "theta_hat_residual",
]
