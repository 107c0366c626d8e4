from __future__ import annotations

from enum import Enum
from typing import Callable

import numpy as np

from ..errors import FieldValueError, StructuralError
from .grid import Grid


class BC(str, Enum):
    DIRICHLET = "dirichlet_zero"
    NEUMANN = "neumann_zero"


def as_bc(bc) -> BC | None:
    if bc is None or isinstance(bc, BC):
        return bc
    try:
        return BC(bc)
    except ValueError:
        raise StructuralError(f"unknown boundary mode {bc!r}") from None


class ScalarField:
    """Grid-sampled scalar over all nodes, boundary included.

    ``bc`` is ``BC.DIRICHLET`` (trace exactly zero), ``BC.NEUMANN`` (zero
    normal flux via ghost reflection) or ``None`` for an unconstrained
    sample such as a coefficient field or an analytic test function.
    The value array is copied and frozen.
    """

    __slots__ = ("grid", "values", "bc")

    def __init__(self, grid: Grid, values, bc=None):
        values = np.array(values, dtype=float)
        if values.shape != grid.shape:
            raise StructuralError(f"values shape {values.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise FieldValueError("field contains NaN or Inf")
        bc = as_bc(bc)
        if bc is BC.DIRICHLET and np.any(values[grid.boundary] != 0.0):
            raise FieldValueError("dirichlet_zero field has a non-zero boundary value")
        values.flags.writeable = False
        self.grid = grid
        self.values = values
        self.bc = bc

    @classmethod
    def zeros(cls, grid: Grid, bc=None) -> ScalarField:
        return cls(grid, np.zeros(grid.shape), bc)

    @classmethod
    def sample(cls, grid: Grid, fn: Callable, bc=None) -> ScalarField:
        """Sample ``fn(x, y)``; a Dirichlet field gets its trace clamped to 0."""
        v = grid.sample(fn)
        if as_bc(bc) is BC.DIRICHLET:
            v[grid.boundary] = 0.0
        return cls(grid, v, bc)

    def with_values(self, values) -> ScalarField:
        return ScalarField(self.grid, values, self.bc)

    def _other(self, other):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise StructuralError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._other(other), self.bc)

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._other(other), self.bc)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._other(other), self.bc)

    __rmul__ = __mul__
    __radd__ = __add__

    def __neg__(self):
        return ScalarField(self.grid, -self.values, self.bc)

    def __repr__(self):
        return f"ScalarField(n={self.grid.n}, bc={self.bc and self.bc.value})"


class VectorField2:
    """Two collocated scalar components sharing grid and boundary mode."""

    __slots__ = ("x", "y")

    def __init__(self, x: ScalarField, y: ScalarField):
        if x.grid != y.grid:
            raise StructuralError("vector components live on different grids")
        if x.bc != y.bc:
            raise StructuralError("vector components carry different boundary modes")
        self.x = x
        self.y = y

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @property
    def bc(self) -> BC | None:
        return self.x.bc

    @classmethod
    def zeros(cls, grid: Grid, bc=None) -> VectorField2:
        return cls(ScalarField.zeros(grid, bc), ScalarField.zeros(grid, bc))

    @classmethod
    def from_arrays(cls, grid: Grid, v1, v2, bc=None) -> VectorField2:
        return cls(ScalarField(grid, v1, bc), ScalarField(grid, v2, bc))

    @property
    def components(self) -> tuple[ScalarField, ScalarField]:
        return (self.x, self.y)

    def __add__(self, other: VectorField2):
        return VectorField2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: VectorField2):
        return VectorField2(self.x - other.x, self.y - other.y)

    def __mul__(self, s):
        return VectorField2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField2(-self.x, -self.y)

    def __repr__(self):
        return f"VectorField2(n={self.grid.n}, bc={self.bc and self.bc.value})"
