"""Manufactured-solution convergence studies.

The manufactured fields are

    theta_m = A e^{-t} sin(pi x) sin(pi y)
    u_m     = A e^{-t} perp_grad(psi)
    B_m     = A/2 e^{-t} perp_grad(psi),   psi = sin^2(pi x) sin^2(pi y),

with zero pressure.  ``continuous_forcing`` injects the closed-form
residual of the continuum equations (derived symbolically) and measures
spatial convergence.  ``discrete_forcing`` injects the residual of the
discrete right-hand side evaluated on the projected manufactured fields,
so the semi-discrete solution is exactly ``e^{-t}`` times the projected
data and only the time-integration error remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from ..coeffs import CoefficientModel
from ..errors import ParameterError
from ..field import Grid, ScalarField
from ..stepper import State
from ..stepper.rhs import layout, rhs_arrays
from .initial import projected_perp_grad, stream_function
from .simulate import simulate

MODES = ("continuous_forcing", "discrete_forcing")


@dataclass
class ConvergenceTable:
    """Errors per refinement level; ``param`` is h (space) or dt (time)."""

    mode: str
    levels: list[int]
    param: list[float]
    errors: list[tuple[float, float, float]]
    orders: list[tuple[float, float, float]] = field(default_factory=list)
    fitted_order: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    monotone: bool = True

    def __post_init__(self):
        e = np.array(self.errors, dtype=float)
        p = np.array(self.param, dtype=float)
        self.orders = []
        for k in range(len(e) - 1):
            with np.errstate(divide="ignore", invalid="ignore"):
                o = np.log(e[k] / e[k + 1]) / np.log(p[k] / p[k + 1])
            self.orders.append(tuple(float(v) for v in o))
        if len(e) >= 2 and np.all(e > 0):
            self.fitted_order = tuple(float(np.polyfit(np.log(p), np.log(e[:, c]), 1)[0]) for c in range(3))
        self.monotone = bool(np.all(np.diff(e, axis=0) < 0)) if len(e) > 1 else True

    def min_order(self) -> float:
        vals = [v for row in self.orders for v in row]
        return min(vals) if vals else math.nan


def _coeff_expr(coef, z):
    return sum(sp.Float(c) * z**k for k, c in enumerate(coef.coeffs))


@lru_cache(maxsize=8)
def _symbolic_forcing(model: CoefficientModel):
    """Lambdified continuum residuals for unit amplitude ``A``."""
    x, y, t, A = sp.symbols("x y t A", real=True)
    pi = sp.pi
    decay = sp.exp(-t)
    psi = sp.sin(pi * x) ** 2 * sp.sin(pi * y) ** 2
    th = A * decay * sp.sin(pi * x) * sp.sin(pi * y)
    u = (-A * decay * sp.diff(psi, y), A * decay * sp.diff(psi, x))
    b = (-A / 2 * decay * sp.diff(psi, y), A / 2 * decay * sp.diff(psi, x))
    kappa = _coeff_expr(model.kappa, th)
    mu = _coeff_expr(model.mu, th)
    sigma = _coeff_expr(model.sigma, th)

    def dot_grad(a, f):
        return a[0] * sp.diff(f, x) + a[1] * sp.diff(f, y)

    def div_c_grad(c, f):
        return sp.diff(c * sp.diff(f, x), x) + sp.diff(c * sp.diff(f, y), y)

    j = sp.diff(b[1], x) - sp.diff(b[0], y)
    perp_sj = (-sp.diff(sigma * j, y), sp.diff(sigma * j, x))
    f_th = sp.diff(th, t) + dot_grad(u, th) - div_c_grad(kappa, th) + u[1]
    f_u = [
        sp.diff(u[i], t) + dot_grad(u, u[i]) - div_c_grad(mu, u[i]) - (th if i == 1 else 0) - dot_grad(b, b[i])
        for i in range(2)
    ]
    f_b = [sp.diff(b[i], t) + dot_grad(u, b[i]) - perp_sj[i] - dot_grad(b, u[i]) for i in range(2)]
    exprs = [f_th, *f_u, *f_b]
    return sp.lambdify((x, y, t, A), exprs, modules="numpy", cse=True)


def continuous_forcing(model: CoefficientModel, grid: Grid, amplitude: float = 1.0):
    """Callable ``t -> (f_theta, f_u1, f_u2, f_b1, f_b2)`` sampled on ``grid``."""
    fn = _symbolic_forcing(model)
    X, Y = grid.mesh
    ones = np.ones(grid.shape)

    def forcing(t: float):
        return [np.asarray(v, dtype=float) * ones for v in fn(X, Y, t, amplitude)]

    return forcing


def exact_arrays(grid: Grid, t: float, amplitude: float = 1.0) -> np.ndarray:
    """Sampled manufactured fields (theta, u1, u2, b1, b2) at time ``t``."""
    X, Y = grid.mesh
    s, c = np.sin(np.pi * X), np.cos(np.pi * X)
    sy, cy = np.sin(np.pi * Y), np.cos(np.pi * Y)
    psi_x = 2 * np.pi * s * c * sy**2
    psi_y = 2 * np.pi * sy * cy * s**2
    a = amplitude * math.exp(-t)
    return np.stack([a * s * sy, -a * psi_y, a * psi_x, -0.5 * a * psi_y, 0.5 * a * psi_x])


def projected_exact(grid: Grid, amplitude: float = 1.0) -> np.ndarray:
    """Manufactured data at t=0 with u and B projected cell-divergence free."""
    x = exact_arrays(grid, 0.0, amplitude)
    psi = ScalarField.sample(grid, stream_function)
    u1, u2 = projected_perp_grad(grid, psi)
    x[1], x[2] = amplitude * u1, amplitude * u2
    x[3], x[4] = 0.5 * amplitude * u1, 0.5 * amplitude * u2
    x[0][grid.boundary] = 0.0
    return x


def discrete_forcing(model: CoefficientModel, grid: Grid, amplitude: float = 1.0):
    """Forcing that makes ``e^{-t} projected_exact`` solve the semi-discrete system."""
    base = projected_exact(grid, amplitude)
    lay = layout(grid.n, "dirichlet", "dirichlet")

    def forcing(t: float):
        ref = math.exp(-t) * base
        f, _, _ = rhs_arrays(ref, model, lay)
        return list(-ref - f)

    return forcing, base


def _errors(grid: Grid, got: State, ref: np.ndarray) -> tuple[float, float, float]:
    w = grid.weights
    d = np.stack(got.arrays()) - ref
    e = [np.sum(w * d[0] ** 2), np.sum(w * (d[1] ** 2 + d[2] ** 2)), np.sum(w * (d[3] ** 2 + d[4] ** 2))]
    return tuple(float(math.sqrt(v)) for v in e)


def _spatial_dt(h: float, t_final: float, factor: float, model: CoefficientModel) -> float:
    # dt exactly proportional to h^2, shrunk to divide t_final; the factor
    # is scaled by the largest coefficient on the certified range
    z = np.linspace(*model.theta_range, 1001)
    cmax = max(float(model[w](z).max()) for w in ("kappa", "mu", "sigma"))
    k = math.ceil(t_final * cmax / (factor * h * h))
    return t_final / k


def run_mms(
    levels,
    mode: str = "continuous_forcing",
    t_final: float = 0.01,
    model: CoefficientModel | None = None,
    *,
    n_time: int = 32,
    amplitude: float = 1.0,
    dt_factor: float = 0.08,
) -> ConvergenceTable:
    """Convergence study against the manufactured solution.

    ``continuous_forcing``: ``levels`` are grid sizes and dt is proportional
    to h^2 (``dt_factor h^2 / max coefficient``, shrunk to divide t_final).
    ``discrete_forcing``: ``levels`` are step counts at fixed ``n_time``.
    Errors are L2 distances at ``t_final``, for theta, u and B.
    """
    model = model or CoefficientModel()
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if not t_final > 0:
        raise ParameterError(f"t_final must be positive, got {t_final}")
    levels = [int(v) for v in levels]
    errors, params = [], []
    if mode == "continuous_forcing":
        for n in levels:
            g = Grid(n)
            s = State.from_arrays(g, *projected_exact(g, amplitude))
            dt = _spatial_dt(g.h, t_final, dt_factor, model)
            res = simulate(s, model, t_final, dt=dt, sample_every=10**9,
                           forcing=continuous_forcing(model, g, amplitude))
            errors.append(_errors(g, res.final, exact_arrays(g, t_final, amplitude)))
            params.append(g.h)
    else:
        g = Grid(n_time)
        forcing, base = discrete_forcing(model, g, amplitude)
        for k in levels:
            s = State.from_arrays(g, *base)
            res = simulate(s, model, t_final, dt=t_final / k, sample_every=10**9, forcing=forcing)
            errors.append(_errors(g, res.final, math.exp(-t_final) * base))
            params.append(t_final / k)
    return ConvergenceTable(mode, levels, params, errors)
