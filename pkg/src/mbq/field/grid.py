from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import ParameterError
from . import stencils


@dataclass(frozen=True)
class Grid:
    """Uniform node lattice on the unit square with ``n`` cells per side.

    There are ``(n+1)**2`` nodes; the ``(n-1)**2`` interior ones carry the
    Dirichlet unknowns.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 8:
            raise ParameterError(f"grid needs n >= 8, got {self.n!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n + 1, self.n + 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights including the h**2 area factor."""
        return stencils.node_weights(self.n) * self.h**2

    @cached_property
    def boundary(self) -> np.ndarray:
        m = np.ones(self.shape, dtype=bool)
        m[1:-1, 1:-1] = False
        return m

    @cached_property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    def sample(self, fn) -> np.ndarray:
        """Evaluate ``fn(x, y)`` on every node."""
        X, Y = self.mesh
        return np.asarray(fn(X, Y), dtype=float) * np.ones(self.shape)
