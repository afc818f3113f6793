"""Wick powers :ω^{⊗n}: for Gaussian, Poisson-type and Meixner-class noise.

One recurrence covers all three families through (λ_eff, ρ):

    W_{n+1} = sym(W_n ⊗ ω) − n sym(W_{n-1} ⊗ 1 ⊗ δ)
              − λ_eff n sym(W_n δ) − ρ n(n−1) sym(W_{n-1} δ δ)

where every δ-link between two slots is the grid delta (1/h)[same cell].
The batched form works on arrays of shape (paths, K_n) of canonical values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _index
from .grid import GridFunction, HermiteScale
from .ladder import NoiseFamily
from .symtensor import RankMismatchError, SymTensor, mode_norm_sq, plain_inner


def _diag_link(d: int, h: float) -> np.ndarray:
    idx = _index.canonical(d, 2)
    return np.where(idx[:, 0] == idx[:, 1], 1.0 / h, 0.0)


def _product(x: np.ndarray, y: np.ndarray, d: int, m: int, n: int) -> np.ndarray:
    """Batched symmetric product of canonical values x (P, K_m) and y (P or 1, K_n)."""
    outer = (x[:, :, None] * y[:, None, :]).reshape(x.shape[0], -1)
    return np.asarray((_index.product_map(d, m, n) @ outer.T).T)


def wick_values(lam: float, rho: float, omega: np.ndarray, width: float, n_max: int) -> list[np.ndarray]:
    """Canonical values of W_0..W_{n_max} for each row of ``omega`` (P, d)."""
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    paths, d = omega.shape
    h = width
    out = [np.ones((paths, 1))]
    if n_max >= 1:
        out.append(omega.copy())
    link = _diag_link(d, h)[None, :]
    for n in range(1, n_max):
        nxt = _product(out[n], omega, d, n, 1)
        nxt -= n * _product(out[n - 1], link, d, n - 1, 2)
        if lam:
            nxt -= (lam * n / h) * np.asarray((_index.repeat_map(d, n, 1) @ out[n].T).T)
        if rho and n >= 2:
            nxt -= (rho * n * (n - 1) / h**2) * np.asarray(
                (_index.repeat_map(d, n - 1, 2) @ out[n - 1].T).T
            )
        out.append(nxt)
    return out


def pair_batch(values: np.ndarray, f: SymTensor) -> np.ndarray:
    """⟨W, f⟩ for each row of canonical values ``values`` (P, K_n)."""
    h = f.grid.width
    return h**f.rank * (values @ (f.multiplicities * f.values))


@dataclass(frozen=True, eq=False)
class WickSequence:
    family: NoiseFamily
    omega: GridFunction
    tensors: tuple

    @property
    def n_max(self) -> int:
        return len(self.tensors) - 1

    def __getitem__(self, n: int) -> SymTensor:
        return self.tensors[n]


def wick_power(family: NoiseFamily, omega: GridFunction, n_max: int) -> WickSequence:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    lam, rho = family.coefficients
    grid = omega.grid
    vals = wick_values(lam, rho, omega.values[None, :], grid.width, n_max)
    tensors = tuple(SymTensor(grid, n, v[0]) for n, v in enumerate(vals))
    return WickSequence(family, omega, tensors)


def wick_eval(seq: WickSequence, f: SymTensor) -> float:
    if f.rank > seq.n_max:
        raise RankMismatchError(f"sequence stops at rank {seq.n_max}, got rank {f.rank}")
    return plain_inner(seq[f.rank], f)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    norm_sq: float
    factorial: int


def growth_profile(family: NoiseFamily, omega: GridFunction, n_max: int, p: float, scale: HermiteScale) -> list[GrowthRow]:
    """Negative-order mode norms ‖:ω^{⊗n}:‖²_{-p} next to n!, for n = 0..n_max."""
    seq = wick_power(family, omega, n_max)
    return [
        GrowthRow(n, mode_norm_sq(seq[n], -p, scale), math.factorial(n))
        for n in range(n_max + 1)
    ]


def fit_growth_exponent(ns, norms) -> float:
    """Least-squares slope of log(norm) against log(n!) over rows with norm > 0."""
    ns = np.asarray(ns)
    norms = np.asarray(norms, dtype=float)
    keep = norms > 0
    x = np.array([math.lgamma(n + 1) for n in ns[keep]])
    y = np.log(norms[keep])
    if keep.sum() < 2 or np.ptp(x) == 0:
        raise ValueError("need at least two rows with distinct n! and positive norm")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
