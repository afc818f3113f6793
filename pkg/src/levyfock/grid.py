"""Finite time grid, cell-value functions and the Hermite mode scale.

A :class:`GridModel` stands in for the real line: ``cells`` cells of
width ``width`` starting at ``origin``.  Functions are stored by their
cell values and every integral is a midpoint sum carrying an explicit
``width`` factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridMismatchError(ValueError):
    """Raised when two objects live on different grids."""


@dataclass(frozen=True)
class GridModel:
    cells: int
    width: float
    origin: float = 0.0

    def __post_init__(self):
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError(f"cells must be a positive integer, got {self.cells!r}")
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width!r}")
        object.__setattr__(self, "cells", int(self.cells))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "origin", float(self.origin))

    @property
    def starts(self) -> np.ndarray:
        return self.origin + self.width * np.arange(self.cells)

    @property
    def midpoints(self) -> np.ndarray:
        return self.starts + 0.5 * self.width

    @property
    def end(self) -> float:
        return self.origin + self.cells * self.width


def make_grid(cells: int, width: float, origin: float = 0.0) -> GridModel:
    return GridModel(cells, width, origin)


def check_same_grid(a: GridModel, b: GridModel) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: GridModel
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.shape[0] != self.grid.cells:
            raise ValueError(
                f"expected {self.grid.cells} cell values, got {values.shape[0]}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: GridModel, value: float = 1.0) -> GridFunction:
        return cls(grid, np.full(grid.cells, float(value)))

    @classmethod
    def indicator(cls, grid: GridModel, cell: int, scale: float = 1.0) -> GridFunction:
        values = np.zeros(grid.cells)
        values[cell] = scale
        return cls(grid, values)

    @classmethod
    def delta(cls, grid: GridModel, cell: int) -> GridFunction:
        """Grid surrogate of the delta function at ``cell`` (mass one)."""
        return cls.indicator(grid, cell, 1.0 / grid.width)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            check_same_grid(self.grid, other.grid)
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __add__(self, other: GridFunction) -> GridFunction:
        check_same_grid(self.grid, other.grid)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        check_same_grid(self.grid, other.grid)
        return GridFunction(self.grid, self.values - other.values)

    def __neg__(self) -> GridFunction:
        return GridFunction(self.grid, -self.values)


def l2_inner(f: GridFunction, g: GridFunction) -> float:
    check_same_grid(f.grid, g.grid)
    return float(f.grid.width * np.dot(f.values, g.values))


def hermite_values(j_max: int, t: np.ndarray) -> np.ndarray:
    """Hermite functions e_0..e_{j_max-1} evaluated at ``t``, shape (j_max, len(t)).

    Uses the normalized three-term recurrence, which is stable far into the
    Gaussian tail where the Rodrigues form overflows.
    """
    t = np.asarray(t, dtype=float)
    out = np.zeros((j_max,) + t.shape)
    if j_max == 0:
        return out
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * t * t)
    if j_max > 1:
        out[1] = np.sqrt(2.0) * t * out[0]
    for j in range(1, j_max - 1):
        out[j + 1] = np.sqrt(2.0 / (j + 1)) * t * out[j] - np.sqrt(j / (j + 1)) * out[j - 1]
    return out


def hermite_mode(j: int, grid: GridModel) -> GridFunction:
    if j < 0:
        raise ValueError("mode index must be nonnegative")
    return GridFunction(grid, hermite_values(j + 1, grid.midpoints)[j])


@dataclass(frozen=True, eq=False)
class HermiteScale:
    """First ``modes`` Hermite functions sampled on ``grid`` with weights λ_j.

    λ_j = (2j+2) ** ``exponent``; the default exponent 2 follows the squared
    eigenvalue convention, exponent 1 gives the oscillator's own spectrum.
    """

    grid: GridModel
    modes: int
    exponent: float = 2.0
    basis: np.ndarray = field(init=False, repr=False)
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be positive")
        basis = hermite_values(self.modes, self.grid.midpoints)
        eig = (2.0 * np.arange(self.modes) + 2.0) ** self.exponent
        basis.setflags(write=False)
        eig.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "eigenvalues", eig)

    def mode(self, j: int) -> GridFunction:
        return GridFunction(self.grid, self.basis[j])

    def analysis_matrix(self) -> np.ndarray:
        """(modes, cells) matrix mapping cell values to coefficients ⟨f, e_j⟩."""
        return self.grid.width * self.basis

    def coefficients(self, f: GridFunction) -> np.ndarray:
        check_same_grid(f.grid, self.grid)
        return self.analysis_matrix() @ f.values

    def gram(self) -> np.ndarray:
        return self.grid.width * self.basis @ self.basis.T

    def weights(self, p: float) -> np.ndarray:
        return self.eigenvalues ** float(p)


def hermite_scale(grid: GridModel, modes: int, exponent: float = 2.0) -> HermiteScale:
    return HermiteScale(grid, modes, exponent)


def sobolev_norm_sq(f: GridFunction, p: float, scale: HermiteScale) -> float:
    c = scale.coefficients(f)
    return float(np.sum(scale.weights(p) * c * c))
