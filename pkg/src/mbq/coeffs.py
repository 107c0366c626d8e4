"""Temperature-dependent coefficient models kappa, mu, sigma.

Each coefficient is a constant or a polynomial in theta, so derivatives and
the Kirchhoff antiderivative ``theta_hat = int_0^theta kappa(z) dz`` are
exact.  A model is certified on ``theta_range``: every coefficient is at
least ``1/c0`` there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial

from .errors import CoefficientBoundError, ParameterError
from .field import ScalarField

Which = Literal["kappa", "mu", "sigma"]
WHICH = ("kappa", "mu", "sigma")
N_SAMPLES = 1000


@dataclass(frozen=True)
class Coefficient:
    kind: str = "const"
    coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.kind not in ("const", "poly"):
            raise ParameterError(f"coefficient kind must be 'const' or 'poly', got {self.kind!r}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise ParameterError("coefficient list must be non-empty and finite")
        if self.kind == "const" and len(coeffs) != 1:
            raise ParameterError("a constant coefficient takes exactly one value")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def constant(cls, c: float) -> Coefficient:
        return cls("const", (c,))

    @classmethod
    def poly(cls, *coeffs: float) -> Coefficient:
        """Coefficients in increasing degree: ``poly(1, 0, 1)`` is 1 + z**2."""
        return cls("poly", coeffs)

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.coeffs)

    def __call__(self, z, order: int = 0):
        p = self.polynomial
        if order:
            p = p.deriv(order)
        return p(np.asarray(z, dtype=float))

    def antiderivative(self, z):
        return self.polynomial.integ(lbnd=0.0)(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class DerivativeBound:
    m: float


@dataclass(frozen=True)
class CoefficientModel:
    kappa: Coefficient = field(default_factory=Coefficient)
    mu: Coefficient = field(default_factory=Coefficient)
    sigma: Coefficient = field(default_factory=Coefficient)
    c0: float = 1.0
    theta_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.theta_range)
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ParameterError(f"theta_range must be a finite interval, got {self.theta_range}")
        object.__setattr__(self, "theta_range", (lo, hi))
        if not self.c0 > 0:
            raise ParameterError(f"c0 must be positive, got {self.c0}")
        z = _sample(lo, hi)
        for name in WHICH:
            vals = self[name](z)
            k = int(np.argmin(vals))
            if vals[k] < 1.0 / self.c0:
                raise CoefficientBoundError(
                    f"{name}({z[k]:.6g}) = {vals[k]:.6g} is below 1/c0 = {1.0 / self.c0:.6g}"
                )

    def __getitem__(self, which: str) -> Coefficient:
        if which not in WHICH:
            raise ParameterError(f"unknown coefficient {which!r}")
        return getattr(self, which)

    @property
    def lower_bound(self) -> float:
        return 1.0 / self.c0

    @property
    def is_constant(self) -> bool:
        return all(self[w].kind == "const" or len(self[w].coeffs) == 1 for w in WHICH)


def _sample(lo: float, hi: float) -> np.ndarray:
    return np.linspace(lo, hi, N_SAMPLES)


def _eval(model: CoefficientModel, which: str, theta: ScalarField, order: int) -> ScalarField:
    vals = model[which](theta.values, order)
    if order == 0 and np.any(vals <= 0.0):
        k = np.unravel_index(np.argmin(vals), vals.shape)
        raise CoefficientBoundError(
            f"{which} = {vals[k]:.6g} <= 0 at theta = {theta.values[k]:.6g}"
        )
    return ScalarField(theta.grid, vals)


def eval(model: CoefficientModel, which: Which, theta: ScalarField) -> ScalarField:  # noqa: A001
    return _eval(model, which, theta, 0)


def eval_deriv(model: CoefficientModel, which: Which, theta: ScalarField) -> ScalarField:
    return _eval(model, which, theta, 1)


def eval_deriv2(model: CoefficientModel, which: Which, theta: ScalarField) -> ScalarField:
    return _eval(model, which, theta, 2)


def in_range(model: CoefficientModel, theta: ScalarField) -> bool:
    lo, hi = model.theta_range
    return bool(theta.values.min() >= lo and theta.values.max() <= hi)


def theta_hat(model: CoefficientModel, theta: ScalarField) -> ScalarField:
    """Kirchhoff transform int_0^theta kappa(z) dz, same boundary mode as theta."""
    vals = model.kappa.antiderivative(theta.values)
    if theta.bc is not None and theta.bc.value == "dirichlet_zero":
        vals[theta.grid.boundary] = 0.0
    return ScalarField(theta.grid, vals, theta.bc)


def derivative_bound(model: CoefficientModel, theta_inf: float) -> DerivativeBound:
    """Max of |c|, |c'|, |c''| over all three coefficients on [-theta_inf, theta_inf]."""
    if not theta_inf >= 0:
        raise ParameterError(f"theta_inf must be >= 0, got {theta_inf}")
    lo = max(-theta_inf, model.theta_range[0])
    hi = min(theta_inf, model.theta_range[1])
    if lo > hi:
        raise ParameterError(
            f"[-{theta_inf}, {theta_inf}] does not meet theta_range {model.theta_range}"
        )
    z = _sample(lo, hi)
    m = max(float(np.max(np.abs(model[w](z, k)))) for w in WHICH for k in (0, 1, 2))
    return DerivativeBound(m)
