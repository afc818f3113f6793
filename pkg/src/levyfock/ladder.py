"""Ladder operators on rank-truncated Fock spaces.

Each operator is assembled rank block by rank block in canonical
coordinates.  With ``∂_t f(t_1..t_{n-1}) = n f(t_1..t_{n-1}, t)`` and the
grid delta ``(1/h)·[same cell]``:

* ``create(φ)``             φ ⊙ f
* ``annihilate(φ)``         n h Σ_j φ_j f(j, ·)
* ``neutral(φ)``            (Σ_k φ(t_k)) f
* ``double_annihilate(φ)``  n(n-1) sym(φ(t_1) f(t_1, t_1, t_2, ..))
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import _index
from .grid import GridFunction, GridModel, check_same_grid, l2_inner
from .symtensor import FockVector, RankMismatchError, SymTensor


@dataclass(frozen=True)
class NoiseFamily:
    """Gaussian, Poisson-type or Meixner-class white noise.

    ``lam`` is the jump scale of a Poisson-type noise (jumps of size lam at
    rate 1/lam²) or the Meixner-class parameter.
    """

    kind: str
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "poisson", "meixner"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and self.lam != 0.0:
            raise ValueError("the Gaussian family has no parameter")
        if self.kind == "poisson" and not self.lam > 0:
            raise ValueError("Poisson-type noise needs lam > 0")
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def gaussian(cls) -> NoiseFamily:
        return cls("gaussian")

    @classmethod
    def poisson(cls, lam: float = 1.0) -> NoiseFamily:
        return cls("poisson", lam)

    @classmethod
    def meixner(cls, lam: float) -> NoiseFamily:
        return cls("meixner", lam)

    @property
    def lam_eff(self) -> float:
        return self.lam

    @property
    def rho(self) -> int:
        return 1 if self.kind == "meixner" else 0

    @property
    def coefficients(self) -> tuple[float, int]:
        return self.lam_eff, self.rho

    @property
    def marginal(self) -> str:
        """Name of the law of the increments."""
        if self.kind != "meixner":
            return self.kind
        a = abs(self.lam)
        if a < 2:
            return "meixner"
        return "gamma" if a == 2 else "pascal"

    @property
    def extended(self) -> bool:
        """Whether chaos norms use the extended (diagonal-corrected) pairing."""
        return self.rho == 1

    def __str__(self) -> str:
        if self.kind == "gaussian":
            return "gaussian"
        return f"{self.kind}({self.lam:g})"


# --- single-rank action -----------------------------------------------------

def _create_block(phi: np.ndarray, d: int, n: int) -> np.ndarray:
    pmap = _index.product_map(d, n, 1)
    k = _index.dimension(d, n)
    # columns of the product map are (a, j) pairs flattened as a*d + j
    return np.asarray(pmap @ np.kron(np.eye(k), phi.reshape(d, 1)))


def _annihilate_block(phi: np.ndarray, h: float, d: int, n: int) -> np.ndarray:
    k_out, k_in = _index.dimension(d, n - 1), _index.dimension(d, n)
    out = np.zeros((k_out, k_in))
    pos = _index.append_positions(d, n - 1)
    rows = np.repeat(np.arange(k_out), d)
    np.add.at(out, (rows, pos.reshape(-1)), np.tile(n * h * phi, k_out))
    return out


def _neutral_block(phi: np.ndarray, d: int, n: int) -> np.ndarray:
    idx = _index.canonical(d, n)
    return np.diag(phi[idx].sum(axis=1)) if n else np.zeros((1, 1))


def _double_annihilate_block(phi: np.ndarray, d: int, n: int) -> np.ndarray:
    k_out, k_in = _index.dimension(d, n - 1), _index.dimension(d, n)
    out = np.zeros((k_out, k_in))
    if n < 2:
        return out
    idx = _index.canonical(d, n - 1)
    pos = _index.repeat_positions(d, n - 1, 1)
    rows = np.repeat(np.arange(k_out), n - 1)
    np.add.at(out, (rows, pos.reshape(-1)), n * phi[idx].reshape(-1))
    return out


def _phi(phi: GridFunction, t: SymTensor) -> np.ndarray:
    check_same_grid(phi.grid, t.grid)
    return phi.values


def create(phi: GridFunction, t: SymTensor) -> SymTensor:
    v = _phi(phi, t)
    return SymTensor(t.grid, t.rank + 1, _create_block(v, t.grid.cells, t.rank) @ t.values)


def annihilate(phi: GridFunction, t: SymTensor) -> SymTensor:
    v = _phi(phi, t)
    if t.rank < 1:
        raise RankMismatchError("cannot annihilate the vacuum component")
    block = _annihilate_block(v, t.grid.width, t.grid.cells, t.rank)
    return SymTensor(t.grid, t.rank - 1, block @ t.values)


def neutral(phi: GridFunction, t: SymTensor) -> SymTensor:
    v = _phi(phi, t)
    return SymTensor(t.grid, t.rank, _neutral_block(v, t.grid.cells, t.rank) @ t.values)


def double_annihilate(phi: GridFunction, t: SymTensor) -> SymTensor:
    v = _phi(phi, t)
    if t.rank < 1:
        raise RankMismatchError("cannot annihilate the vacuum component")
    block = _double_annihilate_block(v, t.grid.cells, t.rank)
    return SymTensor(t.grid, t.rank - 1, block @ t.values)


# --- truncated operators ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Operator on ranks 0..max_rank stored as blocks[(m, n)]: rank n -> rank m."""

    grid: GridModel
    max_rank: int
    blocks: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.grid.cells
        for (m, n), b in self.blocks.items():
            if not (0 <= m <= self.max_rank and 0 <= n <= self.max_rank):
                raise ValueError(f"block ({m}, {n}) outside ranks 0..{self.max_rank}")
            if b.shape != (_index.dimension(d, m), _index.dimension(d, n)):
                raise ValueError(f"block ({m}, {n}) has shape {b.shape}")

    @classmethod
    def zeros(cls, grid: GridModel, max_rank: int) -> TruncatedOperator:
        return cls(grid, max_rank, {})

    @classmethod
    def identity(cls, grid: GridModel, max_rank: int, scale: float = 1.0) -> TruncatedOperator:
        d = grid.cells
        return cls(
            grid,
            max_rank,
            {(n, n): scale * np.eye(_index.dimension(d, n)) for n in range(max_rank + 1)},
        )

    def block(self, m: int, n: int) -> np.ndarray:
        d = self.grid.cells
        b = self.blocks.get((m, n))
        if b is None:
            return np.zeros((_index.dimension(d, m), _index.dimension(d, n)))
        return b

    def _check(self, other: TruncatedOperator) -> None:
        check_same_grid(self.grid, other.grid)
        if self.max_rank != other.max_rank:
            raise ValueError(f"max rank {self.max_rank} vs {other.max_rank}")

    def __add__(self, other: TruncatedOperator) -> TruncatedOperator:
        self._check(other)
        blocks = {k: v.copy() for k, v in self.blocks.items()}
        for k, v in other.blocks.items():
            blocks[k] = blocks[k] + v if k in blocks else v.copy()
        return TruncatedOperator(self.grid, self.max_rank, blocks)

    def __mul__(self, c: float) -> TruncatedOperator:
        return TruncatedOperator(self.grid, self.max_rank, {k: c * v for k, v in self.blocks.items()})

    __rmul__ = __mul__

    def __neg__(self) -> TruncatedOperator:
        return self * -1.0

    def __sub__(self, other: TruncatedOperator) -> TruncatedOperator:
        return self + (-other)

    def __matmul__(self, other: TruncatedOperator) -> TruncatedOperator:
        """Composition; anything routed above ``max_rank`` is lost."""
        self._check(other)
        blocks: dict = {}
        for (m, k), a in self.blocks.items():
            for (k2, n), b in other.blocks.items():
                if k2 != k:
                    continue
                blocks[(m, n)] = blocks[(m, n)] + a @ b if (m, n) in blocks else a @ b
        return TruncatedOperator(self.grid, self.max_rank, blocks)

    def apply(self, F: FockVector) -> FockVector:
        check_same_grid(self.grid, F.grid)
        F = F.truncate(self.max_rank)
        out = [np.zeros(_index.dimension(self.grid.cells, m)) for m in range(self.max_rank + 1)]
        for (m, n), b in self.blocks.items():
            out[m] = out[m] + b @ F[n].values
        return FockVector(self.grid, tuple(SymTensor(self.grid, m, v) for m, v in enumerate(out)))

    @property
    def rank_shifts(self) -> set:
        return {m - n for (m, n), b in self.blocks.items() if np.any(b)}

    @property
    def rank_growth(self) -> int:
        """Largest upward rank shift (0 for lowering or rank-preserving operators)."""
        return max([0, *self.rank_shifts])

    def offsets(self) -> np.ndarray:
        d = self.grid.cells
        return np.cumsum([0] + [_index.dimension(d, n) for n in range(self.max_rank + 1)])

    def dense(self) -> np.ndarray:
        off = self.offsets()
        out = np.zeros((off[-1], off[-1]))
        for (m, n), b in self.blocks.items():
            out[off[m]:off[m + 1], off[n]:off[n + 1]] = b
        return out

    def restricted_dense(self, ranks: Iterable[int]) -> np.ndarray:
        """Columns for input ranks in ``ranks``, all output rows."""
        off = self.offsets()
        full = self.dense()
        cols = np.concatenate([np.arange(off[n], off[n + 1]) for n in ranks])
        return full[:, cols]


def operator_from_blocks(grid: GridModel, max_rank: int, shift: int, builder: Callable[[int], np.ndarray]) -> TruncatedOperator:
    blocks = {}
    for n in range(max_rank + 1):
        m = n + shift
        if 0 <= m <= max_rank:
            blocks[(m, n)] = builder(n)
    return TruncatedOperator(grid, max_rank, blocks)


def creation_matrix(phi: GridFunction, max_rank: int) -> TruncatedOperator:
    d = phi.grid.cells
    return operator_from_blocks(phi.grid, max_rank, 1, lambda n: _create_block(phi.values, d, n))


def annihilation_matrix(phi: GridFunction, max_rank: int) -> TruncatedOperator:
    d, h = phi.grid.cells, phi.grid.width
    return operator_from_blocks(phi.grid, max_rank, -1, lambda n: _annihilate_block(phi.values, h, d, n))


def neutral_matrix(phi: GridFunction, max_rank: int) -> TruncatedOperator:
    d = phi.grid.cells
    return operator_from_blocks(phi.grid, max_rank, 0, lambda n: _neutral_block(phi.values, d, n))


def double_annihilation_matrix(phi: GridFunction, max_rank: int) -> TruncatedOperator:
    d = phi.grid.cells
    return operator_from_blocks(phi.grid, max_rank, -1, lambda n: _double_annihilate_block(phi.values, d, n))


def field_matrix(family: NoiseFamily, phi: GridFunction, max_rank: int) -> TruncatedOperator:
    """A(φ) = a⁺(φ) + λ_eff a⁰(φ) + a⁻(φ) + ρ a₁⁻(φ), truncated at ``max_rank``."""
    if max_rank < 1:
        raise ValueError("max_rank must be at least 1")
    lam, rho = family.coefficients
    op = creation_matrix(phi, max_rank) + annihilation_matrix(phi, max_rank)
    op = op + lam * neutral_matrix(phi, max_rank)
    if rho:
        op = op + rho * double_annihilation_matrix(phi, max_rank)
    return op


def white_noise_at(family: NoiseFamily, grid: GridModel, cell: int, max_rank: int) -> TruncatedOperator:
    """Quantum white noise W(t) for t in ``cell``: the field smeared with the grid delta."""
    return field_matrix(family, GridFunction.delta(grid, cell), max_rank)


def fock_gram(grid: GridModel, max_rank: int) -> np.ndarray:
    """Diagonal of the n!-weighted plain Fock Gram matrix in canonical coordinates."""
    d, h = grid.cells, grid.width
    return np.concatenate(
        [math.factorial(n) * h**n * _index.multiplicity(d, n) for n in range(max_rank + 1)]
    )


def orthonormal_matrix(op: TruncatedOperator, gram_diag: np.ndarray | None = None) -> np.ndarray:
    """Matrix of ``op`` in the basis orthonormal for a diagonal Gram matrix
    (the plain Fock occupation basis by default)."""
    g = fock_gram(op.grid, op.max_rank) if gram_diag is None else gram_diag
    s = np.sqrt(g)
    return s[:, None] * op.dense() / s[None, :]


def pairing_asymmetry(op: TruncatedOperator, gram_diag: np.ndarray, ranks: Iterable[int] | None = None) -> float:
    """max |⟨A f, g⟩ − ⟨f, A g⟩| over canonical basis vectors f, g of the given ranks,
    relative to the largest entry of the Gram-weighted matrix."""
    off = op.offsets()
    ga = gram_diag[:, None] * op.dense()
    diff = ga - ga.T
    if ranks is not None:
        sel = np.concatenate([np.arange(off[n], off[n + 1]) for n in ranks])
        diff = diff[np.ix_(sel, sel)]
    return float(np.max(np.abs(diff)) / max(1.0, np.max(np.abs(ga))))


# --- commutators ------------------------------------------------------------------

class TruncationError(ValueError):
    """Requested ranks are not protected from truncation leakage."""


def commutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    return x @ y - y @ x


def commutator_defect(x, y, expected, ranks) -> tuple[float, float]:
    """(‖[X,Y] − E‖_F, ‖E‖_F) over input columns of the given ranks."""
    x._check(y)
    x._check(expected)
    ranks = list(ranks)
    safe = x.max_rank - x.rank_growth - y.rank_growth
    if not ranks or max(ranks) > safe or min(ranks) < 0:
        raise TruncationError(f"ranks {ranks} exceed the leak-free range 0..{safe}")
    diff = (commutator(x, y) - expected).restricted_dense(ranks)
    return float(np.linalg.norm(diff)), float(np.linalg.norm(expected.restricted_dense(ranks)))


def commutator_residual(x, y, expected, ranks) -> float:
    defect, scale = commutator_defect(x, y, expected, ranks)
    return defect / max(1.0, scale)


def ccr_expected(phi: GridFunction, psi: GridFunction, max_rank: int) -> TruncatedOperator:
    return TruncatedOperator.identity(phi.grid, max_rank, l2_inner(phi, psi))
