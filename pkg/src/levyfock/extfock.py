"""Extended Fock pairing built from diagonal restrictions.

For a partition α of n (α_k parts of size k) the restriction D_α f
keeps α_1 free arguments, then α_2 arguments that each fill two slots,
α_3 that fill three, and so on.  The rank-n extended inner product is

    Σ_α  n!/Π_k(α_k! k^α_k)  ·  h^|α| Σ_{|α|-tuples} (D_α f)(D_α g)

and the full pairing weights rank n by a further n!.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _index
from .grid import GridFunction, check_same_grid
from .ladder import annihilate, create, double_annihilate
from .symtensor import DENSE_BUDGET, FockVector, RankMismatchError, ResourceLimitError, SymTensor


@dataclass(frozen=True)
class PartitionAlpha:
    """Multiplicity vector: counts[k-1] parts of size k."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("partition counts must be nonnegative")
        while counts and counts[-1] == 0:
            counts = counts[:-1]
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(k * c for k, c in enumerate(self.counts, start=1))

    @property
    def size(self) -> int:
        return sum(self.counts)

    @property
    def coefficient(self) -> int:
        """n!/Π(α_k! k^α_k): permutations of n letters with this cycle type."""
        denom = math.prod(math.factorial(c) * k**c for k, c in enumerate(self.counts, start=1))
        return math.factorial(self.n) // denom

    def slots(self) -> np.ndarray:
        """Argument index feeding each of the n slots of D_α."""
        out = []
        arg = 0
        for k, c in enumerate(self.counts, start=1):
            for _ in range(c):
                out.extend([arg] * k)
                arg += 1
        return np.array(out, dtype=np.int64)


def _integer_partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - part, part):
            yield (part,) + rest


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple:
    out = []
    for parts in _integer_partitions(n, n):
        counts = [0] * n
        for p in parts:
            counts[p - 1] += 1
        out.append(PartitionAlpha(tuple(counts)))
    return tuple(out)


def partitions(n: int) -> list[PartitionAlpha]:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return list(_partitions(n))


def _restriction_positions(d: int, n: int, alpha: PartitionAlpha) -> np.ndarray:
    size = alpha.size
    if d**size > DENSE_BUDGET:
        raise ResourceLimitError(f"{d}**{size} restriction tuples exceed budget")
    tuples = _index.all_tuples(d, size)
    return _index.locate(tuples[:, alpha.slots()], d)


def diagonal_restrict(t: SymTensor, alpha: PartitionAlpha) -> np.ndarray:
    """Raw (unsymmetrized) rank-|α| array; diagonal evaluation adds no h factor."""
    if alpha.n != t.rank:
        raise RankMismatchError(f"partition of {alpha.n} applied to a rank-{t.rank} tensor")
    d = t.grid.cells
    vals = t.values[_restriction_positions(d, t.rank, alpha)]
    return vals.reshape((d,) * alpha.size) if alpha.size else vals.reshape(())


def ext_inner(s: SymTensor, t: SymTensor) -> float:
    s._check(t)
    h = s.grid.width
    total = 0.0
    for alpha in partitions(s.rank):
        ds_, dt_ = diagonal_restrict(s, alpha), diagonal_restrict(t, alpha)
        total += alpha.coefficient * h**alpha.size * float(np.sum(ds_ * dt_))
    return total


@lru_cache(maxsize=None)
def _ext_weights(d: int, n: int, h: float) -> np.ndarray:
    # each restriction tuple reads a single canonical slot of both arguments,
    # so the rank-n Gram matrix is diagonal in canonical coordinates
    w = np.zeros(_index.dimension(d, n))
    for alpha in partitions(n):
        pos = _restriction_positions(d, n, alpha)
        w += alpha.coefficient * h**alpha.size * np.bincount(pos, minlength=w.size)
    w.setflags(write=False)
    return w


def ext_weights(grid, n: int) -> np.ndarray:
    """Diagonal of the rank-n extended Gram matrix in canonical coordinates."""
    return _ext_weights(grid.cells, n, grid.width)


def ext_gram(grid, max_rank: int) -> np.ndarray:
    """Diagonal of the full n!-weighted extended Gram matrix over ranks 0..max_rank."""
    return np.concatenate([math.factorial(n) * ext_weights(grid, n) for n in range(max_rank + 1)])


def ext_pairing(F: FockVector, G: FockVector) -> float:
    check_same_grid(F.grid, G.grid)
    top = min(F.max_rank, G.max_rank)
    return sum(math.factorial(n) * ext_inner(F[n], G[n]) for n in range(top + 1))


def _single(t: SymTensor) -> FockVector:
    return FockVector.from_tensors(t.grid, [t])


def adjointness_residual(phi: GridFunction, f: SymTensor, g: SymTensor) -> float:
    """|⟨a⁺(φ)f, g⟩ − ⟨f, (a⁻ + a₁⁻)(φ) g⟩| in the extended pairing, relative to max(1, |sides|)."""
    if g.rank != f.rank + 1:
        raise RankMismatchError(f"need rank(g) = rank(f) + 1, got {f.rank} and {g.rank}")
    lhs = ext_pairing(_single(create(phi, f)), _single(g))
    rhs = ext_pairing(_single(f), _single(annihilate(phi, g) + double_annihilate(phi, g)))
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
