"""S-transform, Wick product and Wick composition of finite Fock vectors."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .grid import GridFunction, check_same_grid
from .symtensor import FockVector, SymTensor, plain_inner, sym_power, sym_product


def s_transform(F: FockVector, xi: GridFunction) -> float:
    """Σ_n ⟨F_n, ξ^{⊗n}⟩ with h^n-weighted pairings."""
    check_same_grid(F.grid, xi.grid)
    total = 0.0
    power = SymTensor.scalar(F.grid)
    for n, comp in enumerate(F):
        if n:
            power = sym_product(power, xi)
        total += plain_inner(comp, power)
    return total


def wick_product(F: FockVector, G: FockVector, max_rank: int | None = None) -> FockVector:
    """(F ⋄ G)_n = Σ_k F_k ⊙ G_{n−k} for n ≤ max_rank.

    The default truncation is max(N_F, N_G); pass N_F + N_G to keep the
    full product, for which S(F ⋄ G) = S(F)·S(G) holds exactly.
    """
    check_same_grid(F.grid, G.grid)
    top = max(F.max_rank, G.max_rank) if max_rank is None else max_rank
    comps = []
    for n in range(top + 1):
        acc = SymTensor.zeros(F.grid, n)
        for k in range(max(0, n - G.max_rank), min(n, F.max_rank) + 1):
            if np.any(F[k].values) and np.any(G[n - k].values):
                acc = acc + sym_product(F[k], G[n - k])
        comps.append(acc)
    return FockVector(F.grid, tuple(comps))


def wick_power_of(F: FockVector, m: int, max_rank: int | None = None) -> FockVector:
    top = F.max_rank if max_rank is None else max_rank
    out = FockVector.vacuum(F.grid, top)
    for _ in range(m):
        out = wick_product(out, F).truncate(top)
    return out


class ExpansionPointError(ValueError):
    """The series is not expanded around the vector's rank-0 value."""


def wick_compose(coeffs: Sequence[float], a: float, F: FockVector, atol: float = 1e-12) -> FockVector:
    """Σ_m c_m (F − a·vacuum)^{⋄m} for a power series Σ c_m (z − a)^m.

    ``a`` must equal F's rank-0 value (the series is only known near S(F)(0)).
    Since the shifted vector has no rank-0 part, the m-th power starts at
    rank m and the sum is finite on ranks 0..max_rank.
    """
    f0 = float(F[0].values[0])
    if abs(f0 - a) > atol * max(1.0, abs(a)):
        raise ExpansionPointError(f"series expanded at {a!r} but S(F)(0) = {f0!r}")
    top = F.max_rank
    shifted = F - FockVector.vacuum(F.grid, top, f0)
    out = FockVector.zeros(F.grid, top)
    power = FockVector.vacuum(F.grid, top)
    for m, c in enumerate(coeffs):
        if m > top:
            break
        if m:
            power = wick_product(power, shifted).truncate(top)
        if c:
            out = out + power * float(c)
    return out


def exp_series(a: float, terms: int) -> list[float]:
    """Taylor coefficients of exp around ``a``."""
    return [math.exp(a) / math.factorial(m) for m in range(terms)]


def wick_exponential(f: GridFunction, max_rank: int) -> FockVector:
    """Wick exponential of the rank-1 vector f: components f^{⊙n}/n!."""
    return FockVector(f.grid, tuple(sym_power(f, n) / math.factorial(n) for n in range(max_rank + 1)))
