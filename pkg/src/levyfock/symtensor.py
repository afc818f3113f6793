"""Symmetric tensors over grid cells and finite Fock vectors.

Values are kept in canonical storage (one entry per nondecreasing
multi-index, see :mod:`levyfock._index`).  Pairings expand the canonical
sum with the multinomial multiplicity of each multi-index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _index
from .grid import GridFunction, GridModel, HermiteScale, check_same_grid

# dense expansions beyond this many entries are refused
DENSE_BUDGET = 1 << 24


class RankMismatchError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SymTensor:
    grid: GridModel
    rank: int
    values: np.ndarray

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        values = np.array(self.values, dtype=float).reshape(-1)
        expected = _index.dimension(self.grid.cells, self.rank)
        if values.shape[0] != expected:
            raise ValueError(f"rank-{self.rank} tensor needs {expected} values, got {values.shape[0]}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, grid: GridModel, rank: int) -> SymTensor:
        return cls(grid, rank, np.zeros(_index.dimension(grid.cells, rank)))

    @classmethod
    def scalar(cls, grid: GridModel, value: float = 1.0) -> SymTensor:
        return cls(grid, 0, [float(value)])

    @classmethod
    def from_function(cls, f: GridFunction) -> SymTensor:
        return cls(f.grid, 1, f.values)

    @classmethod
    def constant(cls, grid: GridModel, rank: int, value: float = 1.0) -> SymTensor:
        return cls(grid, rank, np.full(_index.dimension(grid.cells, rank), float(value)))

    @classmethod
    def from_entries(cls, grid: GridModel, rank: int, entries: dict) -> SymTensor:
        """Build from a mapping multi-index -> value (any index order)."""
        values = np.zeros(_index.dimension(grid.cells, rank))
        for idx, v in entries.items():
            values[_index.locate(np.array(idx, dtype=np.int64).reshape(rank), grid.cells)] = v
        return cls(grid, rank, values)

    # access -------------------------------------------------------------
    @property
    def indices(self) -> np.ndarray:
        return _index.canonical(self.grid.cells, self.rank)

    @property
    def multiplicities(self) -> np.ndarray:
        return _index.multiplicity(self.grid.cells, self.rank)

    def __getitem__(self, idx) -> float:
        if self.rank == 0 and idx in ((), None):
            return float(self.values[0])
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        if idx.shape != (self.rank,):
            raise IndexError(f"need {self.rank} indices, got {idx.shape[0]}")
        if np.any(idx < 0) or np.any(idx >= self.grid.cells):
            raise IndexError(f"index {tuple(idx)} out of range")
        return float(self.values[_index.locate(idx, self.grid.cells)])

    def entries(self) -> Iterator[tuple[tuple[int, ...], float]]:
        for idx, v in zip(self.indices, self.values):
            yield tuple(int(i) for i in idx), float(v)

    def to_dense(self) -> np.ndarray:
        d, n = self.grid.cells, self.rank
        if n == 0:
            return np.array(self.values[0])
        if d**n > DENSE_BUDGET:
            raise ResourceLimitError(f"dense rank-{n} tensor over {d} cells exceeds budget")
        return self.values[_index.dense_positions(d, n)].reshape((d,) * n)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: SymTensor) -> None:
        check_same_grid(self.grid, other.grid)
        if self.rank != other.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")

    def __add__(self, other: SymTensor) -> SymTensor:
        self._check(other)
        return SymTensor(self.grid, self.rank, self.values + other.values)

    def __sub__(self, other: SymTensor) -> SymTensor:
        self._check(other)
        return SymTensor(self.grid, self.rank, self.values - other.values)

    def __mul__(self, c: float) -> SymTensor:
        return SymTensor(self.grid, self.rank, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> SymTensor:
        return self * -1.0

    def __truediv__(self, c: float) -> SymTensor:
        return SymTensor(self.grid, self.rank, self.values / float(c))

    def allclose(self, other: SymTensor, rtol=1e-12, atol=1e-12) -> bool:
        return (
            self.grid == other.grid
            and self.rank == other.rank
            and np.allclose(self.values, other.values, rtol=rtol, atol=atol)
        )

    def __repr__(self) -> str:
        return f"SymTensor(rank={self.rank}, cells={self.grid.cells}, values={self.values!r})"


def _as_tensor(x) -> SymTensor:
    if isinstance(x, GridFunction):
        return SymTensor.from_function(x)
    return x


def symmetrize(array, grid: GridModel) -> SymTensor:
    """Average a raw cubic array over all permutations of its axes."""
    array = np.asarray(array, dtype=float)
    n = array.ndim
    d = grid.cells
    if any(s != d for s in array.shape):
        raise ValueError(f"expected a cubic array with side {d}, got shape {array.shape}")
    if n == 0:
        return SymTensor.scalar(grid, float(array))
    sums = np.bincount(
        _index.dense_positions(d, n), weights=array.reshape(-1), minlength=_index.dimension(d, n)
    )
    return SymTensor(grid, n, sums / _index.multiplicity(d, n))


def sym_product(s, t) -> SymTensor:
    s, t = _as_tensor(s), _as_tensor(t)
    check_same_grid(s.grid, t.grid)
    pmap = _index.product_map(s.grid.cells, s.rank, t.rank)
    return SymTensor(s.grid, s.rank + t.rank, pmap @ np.outer(s.values, t.values).reshape(-1))


def sym_power(f, n: int) -> SymTensor:
    f = _as_tensor(f)
    out = SymTensor.scalar(f.grid)
    for _ in range(n):
        out = sym_product(out, f)
    return out


def plain_inner(s: SymTensor, t: SymTensor) -> float:
    """h^n times the sum of s*t over all d^n tuples (no n! weight)."""
    s._check(t)
    h = s.grid.width
    return float(h**s.rank * np.sum(s.multiplicities * s.values * t.values))


@dataclass(frozen=True, eq=False)
class FockVector:
    grid: GridModel
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a Fock vector needs at least the rank-0 component")
        for n, c in enumerate(comps):
            check_same_grid(self.grid, c.grid)
            if c.rank != n:
                raise RankMismatchError(f"component {n} has rank {c.rank}")
        object.__setattr__(self, "components", comps)

    @property
    def max_rank(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, n: int) -> SymTensor:
        return self.components[n]

    def __iter__(self):
        return iter(self.components)

    @classmethod
    def zeros(cls, grid: GridModel, max_rank: int) -> FockVector:
        return cls(grid, tuple(SymTensor.zeros(grid, n) for n in range(max_rank + 1)))

    @classmethod
    def vacuum(cls, grid: GridModel, max_rank: int = 0, value: float = 1.0) -> FockVector:
        comps = [SymTensor.scalar(grid, value)]
        comps += [SymTensor.zeros(grid, n) for n in range(1, max_rank + 1)]
        return cls(grid, tuple(comps))

    @classmethod
    def from_tensors(cls, grid: GridModel, tensors: Sequence[SymTensor], max_rank: int | None = None) -> FockVector:
        """Place tensors at their ranks; missing ranks are zero, repeated ranks add."""
        top = max([t.rank for t in tensors], default=0)
        if max_rank is None:
            max_rank = top
        elif top > max_rank:
            raise RankMismatchError(f"tensor rank {top} exceeds max_rank {max_rank}")
        comps = [SymTensor.zeros(grid, n) for n in range(max_rank + 1)]
        for t in tensors:
            comps[t.rank] = comps[t.rank] + t
        return cls(grid, tuple(comps))

    def truncate(self, max_rank: int) -> FockVector:
        if max_rank <= self.max_rank:
            return FockVector(self.grid, self.components[: max_rank + 1])
        extra = tuple(SymTensor.zeros(self.grid, n) for n in range(self.max_rank + 1, max_rank + 1))
        return FockVector(self.grid, self.components + extra)

    def _aligned(self, other: FockVector):
        check_same_grid(self.grid, other.grid)
        top = max(self.max_rank, other.max_rank)
        return self.truncate(top), other.truncate(top)

    def __add__(self, other: FockVector) -> FockVector:
        a, b = self._aligned(other)
        return FockVector(self.grid, tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: FockVector) -> FockVector:
        a, b = self._aligned(other)
        return FockVector(self.grid, tuple(x - y for x, y in zip(a, b)))

    def __mul__(self, c: float) -> FockVector:
        return FockVector(self.grid, tuple(x * c for x in self.components))

    __rmul__ = __mul__

    def __neg__(self) -> FockVector:
        return self * -1.0

    def allclose(self, other: FockVector, rtol=1e-12, atol=1e-12) -> bool:
        a, b = self._aligned(other)
        return all(x.allclose(y, rtol, atol) for x, y in zip(a, b))


def fock_norm_sq(F: FockVector) -> float:
    return sum(plain_inner(c, c) * math.factorial(n) for n, c in enumerate(F))


def _kernel_power_apply(values: np.ndarray, kernel: np.ndarray, d: int, n: int) -> np.ndarray:
    """Canonical values of K^{⊗n} T for a symmetric (d, d) kernel K.

    K is applied one axis at a time.  After k steps the intermediate is
    symmetric within the first k axes and within the remaining n − k, so it
    is stored as a (dim(d,k), dim(d,n−k)) matrix instead of a dense d^n array.
    """
    state = values.reshape(1, -1)
    for k in range(n):
        r = n - k
        grab = _index.append_positions(d, r - 1)
        # x[A, B', i] = state[A, B' + (i,)]
        x = state[:, grab]
        y = np.tensordot(x, kernel, axes=([2], [1]))
        lead = _index.canonical(d, k + 1)
        rest = _index.locate(lead[:, :k], d) if k else np.zeros(len(lead), dtype=np.int64)
        # new group A' = A + (j,), j its largest entry
        state = y[rest, :, lead[:, k]]
    return state[:, 0]


def mode_norm_sq(t: SymTensor, p: float, scale: HermiteScale) -> float:
    """Σ over mode tuples of Π_k λ_{j_k}^p |⟨t, e_{j_1}⊗…⊗e_{j_n}⟩|².

    The weights factor over axes, so this is ⟨t, K^{⊗n} t⟩ (tuple sum) with
    K = Mᵀ diag(λ^p) M and M the analysis matrix.
    """
    check_same_grid(t.grid, scale.grid)
    if t.rank == 0:
        return float(t.values[0] ** 2)
    n, d = t.rank, t.grid.cells
    peak = max(_index.dimension(d, k) * _index.dimension(d, n - k - 1) * d for k in range(n))
    if peak > DENSE_BUDGET:
        raise ResourceLimitError(f"mode transform of rank {n} on {d} cells exceeds budget")
    m = scale.analysis_matrix()
    kernel = m.T @ (scale.weights(p)[:, None] * m)
    applied = _kernel_power_apply(t.values, kernel, d, n)
    return float(np.sum(_index.multiplicity(d, n) * t.values * applied))


def kappa_p_norm_sq(F: FockVector, kappa: float, p: float, scale: HermiteScale) -> float:
    if not -1.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [-1, 1]")
    return sum(
        mode_norm_sq(c, p, scale) * float(math.factorial(n)) ** (1.0 + kappa)
        for n, c in enumerate(F)
    )
