"""Exact discrete Helmholtz projection onto cell-divergence-free node fields.

The constraint is the cell-centered divergence ``div_cell`` (x-differences
averaged across each cell, likewise in y), imposed on every cell.  The
projection is orthogonal in the trapezoid inner product over the free
nodes of each component, so it is idempotent, self-adjoint and never
increases the L2 norm.  The potential lives at cell centers; the normal
equations ``Div W^-1 Div^T p = Div v`` are factorized once per grid and
free-node layout with a sparse LU.

The operator ``Div W^-1 Div^T`` is singular: constants always lie in its
kernel, and the cell checkerboard does too when every wall node is fixed.
One cell per kernel direction is pinned to zero, which is harmless because
the right-hand side is orthogonal to the kernel.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from ..errors import SolverFailure
from ..field import stencils as st


def _div_blocks(n: int):
    h = 1.0 / n
    ones = np.ones(n)
    diff = sp.diags([-ones, ones], [0, 1], shape=(n, n + 1)) / h
    avg = sp.diags([0.5 * ones, 0.5 * ones], [0, 1], shape=(n, n + 1))
    # row-major (i, j) flattening matches numpy's ravel of f[i, j]
    return sp.kron(diff, avg, format="csr"), sp.kron(avg, diff, format="csr")


def _checkerboard(n: int) -> np.ndarray:
    i, j = np.indices((n, n))
    return np.where((i + j) % 2 == 0, 1.0, -1.0).ravel()


class Projector:
    """Orthogonal projector for node vector fields with given free-node masks."""

    def __init__(self, n: int, free1: np.ndarray, free2: np.ndarray):
        self.n = n
        self.h = 1.0 / n
        self.free1 = free1.copy()
        self.free2 = free2.copy()
        dx, dy = _div_blocks(n)
        f1 = free1.ravel()
        f2 = free2.ravel()
        self.idx1 = np.flatnonzero(f1)
        self.idx2 = np.flatnonzero(f2)
        self.div = sp.hstack([dx[:, self.idx1], dy[:, self.idx2]], format="csr")
        w = st.node_weights(n).ravel()
        self.winv = np.concatenate([1.0 / w[self.idx1], 1.0 / w[self.idx2]])
        self.div_t_winv = sp.diags(self.winv) @ self.div.T.tocsr()
        k = (self.div @ self.div_t_winv).tocsc()

        self.kernel = []
        scale = abs(k).max()
        for v in (np.ones(n * n), _checkerboard(n)):
            if np.abs(k @ v).max() <= 1e-10 * scale * np.abs(v).max():
                self.kernel.append(v / np.linalg.norm(v))
        if len(self.kernel) == 2:
            # constant and checkerboard together span the two parity classes
            pins = [0, 1]
        else:
            pins = [0][: len(self.kernel)]
        self.keep = np.ones(n * n, dtype=bool)
        self.keep[pins] = False
        try:
            self.lu = sla.splu(k[self.keep][:, self.keep].tocsc(), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SolverFailure(f"projection matrix factorization failed: {exc}") from exc

    def _pack(self, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
        return np.concatenate([v1.ravel()[self.idx1], v2.ravel()[self.idx2]])

    def _unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        shape = (self.n + 1, self.n + 1)
        a = np.zeros(shape[0] * shape[1])
        b = np.zeros_like(a)
        m = len(self.idx1)
        a[self.idx1] = x[:m]
        b[self.idx2] = x[m:]
        return a.reshape(shape), b.reshape(shape)

    def divergence(self, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
        """Cell divergence of the free part of (v1, v2), shape (n, n)."""
        return (self.div @ self._pack(v1, v2)).reshape(self.n, self.n)

    def project(self, v1: np.ndarray, v2: np.ndarray):
        """Return ``(w1, w2, phi)`` with ``w = v - G phi`` cell-divergence free.

        ``G = -W^-1 Div^T`` is the discrete gradient from cells to nodes and
        ``phi`` (cell centered, shape (n, n)) has no kernel component.
        Values on fixed nodes are returned as zero.
        """
        x = self._pack(v1, v2)
        r = self.div @ x
        lam = np.zeros(self.n * self.n)
        lam[self.keep] = self.lu.solve(r[self.keep])
        for v in self.kernel:
            lam -= v * (v @ lam)
        y = x - self.div_t_winv @ lam
        scale = np.abs(x).max() / self.h + 1e-300
        resid = np.abs(self.div @ y).max()
        if resid > 1e-9 * scale and resid > 1e-12 * np.abs(r).max():
            raise SolverFailure(f"projection left divergence {resid:.3e} (scale {scale:.3e})")
        w1, w2 = self._unpack(y)
        return w1, w2, -lam.reshape(self.n, self.n)

    def gradient(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Discrete gradient ``G p`` of a cell field, restricted to free nodes."""
        return self._unpack(-self.div_t_winv @ p.ravel())


def wall_masks(n: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Free-node masks: ``"dirichlet"`` fixes every wall node, ``"conducting"``
    fixes only the normal component on each wall."""
    shape = (n + 1, n + 1)
    if kind == "dirichlet":
        m = np.zeros(shape, dtype=bool)
        m[1:-1, 1:-1] = True
        return m, m.copy()
    if kind == "conducting":
        m1 = np.zeros(shape, dtype=bool)
        m1[1:-1, :] = True
        m2 = np.zeros(shape, dtype=bool)
        m2[:, 1:-1] = True
        return m1, m2
    raise ValueError(f"unknown wall kind {kind!r}")


@lru_cache(maxsize=16)
def projector(n: int, kind: str = "dirichlet") -> Projector:
    return Projector(n, *wall_masks(n, kind))
