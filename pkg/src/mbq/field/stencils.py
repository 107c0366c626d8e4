"""Array-level finite-difference stencils on the (n+1) x (n+1) node lattice.

Arrays are indexed ``f[..., i, j]`` with ``x = i*h`` and ``y = j*h``; leading
axes batch several fields through one call.  Four families live here:

* nodal first derivatives (centered inside, one-sided second order on the
  boundary),
* node -> cell difference/average operators and their transposes, used for
  the cell-centered divergence, current and pressure gradient,
* the skew-symmetric advection built on the cell operators,
* the flux-form variable-coefficient diffusion operator.

Everything is written with slicing so each routine is a handful of numpy
calls, except the advection kernel, which is compiled with numba because
it dominates the cost of a time step.
"""

from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np


def _sl(axis: int, s: slice | int) -> tuple:
    # axis 0 is x (second to last array axis), axis 1 is y (last); any
    # leading axes are batch dimensions
    return (Ellipsis, s, slice(None)) if axis == 0 else (Ellipsis, s)


def trapezoid_weights_1d(n: int) -> np.ndarray:
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return w


@lru_cache(maxsize=64)
def node_weights(n: int) -> np.ndarray:
    """Composite trapezoid weights divided by h**2 (so interior nodes weigh 1).

    Cached and read-only.
    """
    w = trapezoid_weights_1d(n)
    out = np.outer(w, w)
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# nodal first derivatives


def d_node(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Centered derivative at interior nodes, one-sided 2nd order at the ends."""
    out = np.empty_like(f)
    s = 0.5 / h
    out[_sl(axis, slice(1, -1))] = (f[_sl(axis, slice(2, None))] - f[_sl(axis, slice(None, -2))]) * s
    out[_sl(axis, 0)] = (-3.0 * f[_sl(axis, 0)] + 4.0 * f[_sl(axis, 1)] - f[_sl(axis, 2)]) * s
    out[_sl(axis, -1)] = (3.0 * f[_sl(axis, -1)] - 4.0 * f[_sl(axis, -2)] + f[_sl(axis, -3)]) * s
    return out


# ---------------------------------------------------------------------------
# node <-> cell operators


def dx_cell(f: np.ndarray, h: float) -> np.ndarray:
    """x-derivative at cell centers: x-difference averaged over the two y-edges."""
    d = f[..., 1:, :] - f[..., :-1, :]
    return (d[..., :-1] + d[..., 1:]) * (0.5 / h)


def dy_cell(f: np.ndarray, h: float) -> np.ndarray:
    d = f[..., 1:] - f[..., :-1]
    return (d[..., :-1, :] + d[..., 1:, :]) * (0.5 / h)


def _pad_cells(g: np.ndarray) -> np.ndarray:
    r = np.zeros(g.shape[:-2] + (g.shape[-2] + 2, g.shape[-1] + 2))
    r[..., 1:-1, 1:-1] = g
    return r


def dx_cell_T(g: np.ndarray, h: float) -> np.ndarray:
    s = _pad_cells(g)
    s = s[..., :-1] + s[..., 1:]
    return (s[..., :-1, :] - s[..., 1:, :]) * (0.5 / h)


def dy_cell_T(g: np.ndarray, h: float) -> np.ndarray:
    s = _pad_cells(g)
    s = s[..., :-1, :] + s[..., 1:, :]
    return (s[..., :-1] - s[..., 1:]) * (0.5 / h)


def div_cell(v1: np.ndarray, v2: np.ndarray, h: float) -> np.ndarray:
    return dx_cell(v1, h) + dy_cell(v2, h)


def curl_cell(v1: np.ndarray, v2: np.ndarray, h: float) -> np.ndarray:
    return dx_cell(v2, h) - dy_cell(v1, h)


def cell_average(f: np.ndarray) -> np.ndarray:
    s = f[..., 1:, :] + f[..., :-1, :]
    return 0.25 * (s[..., 1:] + s[..., :-1])


def cell_average_T(g: np.ndarray) -> np.ndarray:
    s = _pad_cells(g)
    s = s[..., 1:, :] + s[..., :-1, :]
    return 0.25 * (s[..., 1:] + s[..., :-1])


def cell_to_node(p: np.ndarray) -> np.ndarray:
    """Average of the cells touching each node (1, 2 or 4 of them)."""
    return cell_average_T(p) / cell_average_T(np.ones_like(p))


def node_from_cells(g: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`cell_average` in the trapezoid/cell inner products."""
    return cell_average_T(g) / node_weights(g.shape[-1])


@lru_cache(maxsize=64)
def _inv_node_weights(n: int) -> np.ndarray:
    out = 1.0 / node_weights(n)
    out.flags.writeable = False
    return out


def d_adv(v: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Node gradient used by advection: minus the adjoint of the cell divergence.

    ``D_k v = -W^-1 (d_k,cell)^T cell_average(v)``.  A 3x3 stencil, second
    order at interior nodes.  Its adjoint divergence is
    ``-node_from_cells(div_cell(.))``, so it annihilates exactly the fields
    the projection makes cell-divergence free.
    """
    winv = _inv_node_weights(v.shape[-1] - 1) * (0.125 / h)
    # 4 * cell_average(v), zero padded by one cell
    s = v[..., 1:, :] + v[..., :-1, :]
    p = _pad_cells(s[..., 1:] + s[..., :-1])
    sy = p[..., :-1] + p[..., 1:]
    sx = p[..., :-1, :] + p[..., 1:, :]
    d1 = sy[..., 1:, :] - sy[..., :-1, :]
    d1 *= winv
    d2 = sx[..., 1:] - sx[..., :-1]
    d2 *= winv
    return d1, d2


def advect_skew(a1: np.ndarray, a2: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    """Skew-symmetric advection 1/2 [a.D v + div(a v)] for scalar components.

    ``div(a v)`` is taken as the exact adjoint of ``a.D``, so
    <advect(a, v), w> = -<advect(a, w), v> in the trapezoid inner product
    for any ``a``.  ``v`` may carry leading batch axes.  This is the hot
    loop of the stepper and runs as a compiled kernel; the slicing form is
    ``0.5 * (a1*D1 v + a2*D2 v) + 0.5 * node_from_cells(div_cell(a1 v, a2 v))``.
    """
    n = v.shape[-1] - 1
    vb = np.ascontiguousarray(v, dtype=float).reshape(-1, n + 1, n + 1)
    a1 = np.ascontiguousarray(a1, dtype=float)
    a2 = np.ascontiguousarray(a2, dtype=float)
    return _advect_kernel(a1, a2, vb, float(h), _inv_node_weights(n)).reshape(v.shape)


@numba.njit(cache=True)
def _advect_kernel(a1, a2, v, h, winv):
    nb, m, _ = v.shape
    n = m - 1
    out = np.empty_like(v)
    p = np.zeros((n + 2, n + 2))  # 4 * cell average of v, zero padded
    q = np.zeros((n + 2, n + 2))  # 2h * cell divergence of a v, zero padded
    sd = 0.0625 / h
    sc = 0.0625 / h
    for b in range(nb):
        for i in range(n):
            for j in range(n):
                v00 = v[b, i, j]
                v10 = v[b, i + 1, j]
                v01 = v[b, i, j + 1]
                v11 = v[b, i + 1, j + 1]
                p[i + 1, j + 1] = v00 + v10 + v01 + v11
                q[i + 1, j + 1] = (
                    a1[i + 1, j] * v10 - a1[i, j] * v00 + a1[i + 1, j + 1] * v11 - a1[i, j + 1] * v01
                    + a2[i, j + 1] * v01 - a2[i, j] * v00 + a2[i + 1, j + 1] * v11 - a2[i + 1, j] * v10
                )
        for i in range(m):
            for j in range(m):
                d1 = p[i + 1, j] + p[i + 1, j + 1] - p[i, j] - p[i, j + 1]
                d2 = p[i, j + 1] + p[i + 1, j + 1] - p[i, j] - p[i + 1, j]
                cons = q[i, j] + q[i + 1, j] + q[i, j + 1] + q[i + 1, j + 1]
                out[b, i, j] = winv[i, j] * (sd * (a1[i, j] * d1 + a2[i, j] * d2) + sc * cons)
    return out


# ---------------------------------------------------------------------------
# diffusion


def flux_diffusion(c: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """div(c grad f) in flux form with arithmetic face averages of ``c``.

    Boundary rows follow zero-flux ghost reflection; callers with
    Dirichlet data simply discard them.  Symmetric in the trapezoid inner
    product.
    """
    n = f.shape[-1] - 1
    shape = np.broadcast_shapes(c.shape, f.shape)
    # x faces
    g = np.zeros(shape[:-2] + (n + 2, n + 1))
    g[..., 1:-1, :] = (c[..., 1:, :] + c[..., :-1, :]) * (f[..., 1:, :] - f[..., :-1, :])
    winv = (0.5 / (h * h)) / trapezoid_weights_1d(n)
    out = g[..., 1:, :] - g[..., :-1, :]
    out *= winv[:, None]
    # y faces
    g = np.zeros(shape[:-1] + (n + 2,))
    g[..., 1:-1] = (c[..., 1:] + c[..., :-1]) * (f[..., 1:] - f[..., :-1])
    g = g[..., 1:] - g[..., :-1]
    g *= winv
    out += g
    return out


def face_dissipation(c: np.ndarray | None, f: np.ndarray, h: float) -> float:
    """-<flux_diffusion(c, f), f> in trapezoid weights (times h**2 area).

    Equals the sum over faces of c_face * (difference / h)**2 * h**2, faces
    lying on the wall taking the half transverse trapezoid weight.
    ``c=None`` means a unit coefficient; leading axes of ``f`` are summed.
    """
    w = trapezoid_weights_1d(f.shape[-1] - 1)
    d = f[..., 1:, :] - f[..., :-1, :]
    d *= d
    if c is not None:
        d *= c[..., 1:, :] + c[..., :-1, :]
    total = float(np.sum(d @ w))
    d = f[..., 1:] - f[..., :-1]
    d *= d
    if c is not None:
        d *= c[..., 1:] + c[..., :-1]
    total += float(np.sum(w @ d))
    return total if c is None else 0.5 * total
