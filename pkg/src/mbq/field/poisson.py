"""Fast direct solvers for the compact 5-point Laplacian on the unit square.

Dirichlet problems are diagonalised by the type-I sine transform on the
interior nodes, Neumann (ghost-reflection) problems by the type-I cosine
transform on all nodes.  The Neumann operator is symmetric in the
trapezoid inner product, so its compatibility condition is a zero
trapezoid-weighted mean, which is what the zero cosine mode removes.
"""

from __future__ import annotations

import numpy as np
from scipy import fft

from ..errors import ParameterError
from .fields import BC, ScalarField, as_bc


def _eigs_1d(n: int, k: np.ndarray) -> np.ndarray:
    h = 1.0 / n
    return (2.0 * np.cos(np.pi * k / n) - 2.0) / (h * h)


def poisson_solve(rhs: ScalarField, bc=BC.DIRICHLET) -> ScalarField:
    """Solve ``laplacian(u) = rhs`` (rhs minus its mean in Neumann mode)."""
    bc = as_bc(bc)
    n = rhs.grid.n
    if bc is BC.DIRICHLET:
        k = np.arange(1, n)
        lam = _eigs_1d(n, k)[:, None] + _eigs_1d(n, k)[None, :]
        coef = fft.dstn(rhs.values[1:-1, 1:-1], type=1)
        u = np.zeros(rhs.grid.shape)
        u[1:-1, 1:-1] = fft.idstn(coef / lam, type=1)
        return ScalarField(rhs.grid, u, BC.DIRICHLET)
    if bc is BC.NEUMANN:
        k = np.arange(n + 1)
        lam = _eigs_1d(n, k)[:, None] + _eigs_1d(n, k)[None, :]
        coef = fft.dctn(rhs.values, type=1)
        lam[0, 0] = 1.0
        coef[0, 0] = 0.0
        u = fft.idctn(coef / lam, type=1)
        return ScalarField(rhs.grid, u, BC.NEUMANN)
    raise ParameterError(f"poisson_solve needs a boundary mode, got {bc!r}")


def remove_mean(f: ScalarField) -> ScalarField:
    w = f.grid.weights
    return f.with_values(f.values - np.sum(w * f.values) / np.sum(w))
