"""Meixner-class measures ν_λ and their orthonormal polynomials.

The polynomials satisfy

    t p_n = √((n+1)(n+2)) p_{n+1} + λ(n+1) p_n + √(n(n+1)) p_{n-1},

so ν_λ has mean λ and variance 2.  For 0 ≤ λ < 2 the measure has the
Meixner density, at λ = 2 the density e^{-s} s on (0, ∞), and for λ > 2
it is a Pascal (negative binomial) law on the lattice √(λ²−4)·ℕ.
Negative λ is the mirror image of |λ|.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

MEIXNER_WINDOW = 40.0
MEIXNER_STEP = 2e-3
# each side of the window spans at least this many e-folds of the density's decay
MEIXNER_EFOLDS = 80.0
GAMMA_NODES = 64
PASCAL_ATOMS = 400
MASS_TOL = 1e-8


class QuadratureError(RuntimeError):
    pass


def recurrence_coefficients(lam: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal a_n = λ(n+1) and off-diagonal b_n = √((n+1)(n+2)) of the Jacobi matrix."""
    n = np.arange(n_max + 1)
    return lam * (n + 1.0), np.sqrt((n + 1.0) * (n + 2.0))


def jacobi_matrix(lam: float, size: int) -> np.ndarray:
    a, b = recurrence_coefficients(lam, size - 1)
    return np.diag(a) + np.diag(b[:-1], 1) + np.diag(b[:-1], -1)


def poly_table(lam: float, n_max: int, t) -> np.ndarray:
    """p_0..p_{n_max} at ``t``; shape (n_max+1,) + shape(t)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros((n_max + 1,) + t.shape)
    out[0] = 1.0
    for n in range(n_max):
        prev = out[n - 1] if n else 0.0
        out[n + 1] = ((t - lam * (n + 1)) * out[n] - np.sqrt(n * (n + 1.0)) * prev) / np.sqrt(
            (n + 1.0) * (n + 2.0)
        )
    return out


def poly_eval(lam: float, n: int, t):
    if n < 0:
        raise ValueError("degree must be nonnegative")
    out = poly_table(lam, n, t)[n]
    return float(out) if out.ndim == 0 else out


def classify(lam: float) -> str:
    a = abs(lam)
    if a < 2:
        return "meixner"
    return "gamma" if a == 2 else "pascal"


def meixner_density(lam: float, s):
    """Density of ν_λ for |λ| < 2.

    With c = √(4−λ²) and a = s/c this is (c/2π)·|Γ(1+ia)|²·exp(2a·arctan(λ/c)),
    using |Γ(1+ia)|² = πa/sinh(πa).  The exponent's sign puts the mean at +λ.
    """
    if abs(lam) >= 2:
        raise ValueError("the Meixner density needs |λ| < 2")
    s = np.asarray(s, dtype=float)
    c = np.sqrt(4.0 - lam * lam)
    a = s / c
    pa = np.pi * np.abs(a)
    small = pa < 1e-8
    safe = np.where(small, 1.0, pa)
    # log(πa/sinh(πa)) = log(2π|a|) − π|a| − log(1 − e^{−2π|a|}), overflow-free
    log_gamma_sq = np.where(
        small, 0.0, np.log(2.0 * safe) - safe - np.log(-np.expm1(-2.0 * safe))
    )
    out = c / (2.0 * np.pi) * np.exp(log_gamma_sq + 2.0 * a * np.arctan(lam / c))
    return float(out) if out.ndim == 0 else out


def meixner_window(lam: float) -> tuple[float, float]:
    """Quadrature window for ν_λ, |λ| < 2: at least [-40, 40], widened on the
    side where the density e^{-(π ∓ 2θ)|s|/c} decays slowly."""
    c = np.sqrt(4.0 - lam * lam)
    theta = np.arctan(lam / c)
    hi = max(MEIXNER_WINDOW, MEIXNER_EFOLDS * c / (np.pi - 2 * theta))
    lo = max(MEIXNER_WINDOW, MEIXNER_EFOLDS * c / (np.pi + 2 * theta))
    return -float(lo), float(hi)


@dataclass(frozen=True, eq=False)
class MeixnerClassMeasure:
    """ν_λ as a finite node/weight rule: midpoint nodes on a window (Meixner),
    Gauss–Laguerre nodes (gamma) or the first atoms of the series (Pascal)."""

    lam: float
    kind: str = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    tail_bound: float = field(init=False)

    def __post_init__(self):
        lam = float(self.lam)
        a = abs(lam)
        kind = classify(lam)
        tail = 0.0
        if kind == "meixner":
            lo, hi = meixner_window(a)
            count = int(np.ceil((hi - lo) / MEIXNER_STEP))
            step = (hi - lo) / count
            nodes = lo + step * (np.arange(count) + 0.5)
            weights = meixner_density(a, nodes) * step
            tail = float(meixner_density(a, np.array([lo, hi])).sum())
        elif kind == "gamma":
            nodes, weights = roots_genlaguerre(GAMMA_NODES, 1.0)
        else:
            c, q = self.pascal_parameters(a)
            k = np.arange(1, PASCAL_ATOMS + 1)
            nodes = c * k
            weights = (a * a - 4.0) * q**k * k
            # Σ_{k>K} k q^k ≤ (K+1) q^{K+1}/(1-q)^2
            tail = float((a * a - 4.0) * (PASCAL_ATOMS + 1) * q ** (PASCAL_ATOMS + 1) / (1 - q) ** 2)
        if lam < 0:
            nodes = -nodes[::-1]
            weights = weights[::-1]
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "nodes", np.asarray(nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(weights, dtype=float))
        object.__setattr__(self, "tail_bound", tail)

    @staticmethod
    def pascal_parameters(lam: float) -> tuple[float, float]:
        """Lattice spacing c = √(λ²−4) and ratio q = (λ−c)/(λ+c)."""
        a = abs(lam)
        c = np.sqrt(a * a - 4.0)
        return float(c), float((a - c) / (a + c))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def density(self, s):
        if self.kind == "meixner":
            return meixner_density(self.lam, s)
        if self.kind == "gamma":
            s = np.asarray(s, dtype=float) * np.sign(self.lam)
            return np.where(s > 0, np.exp(-np.abs(s)) * np.abs(s), 0.0)
        raise ValueError("the Pascal measure is atomic")

    def integrate(self, fn) -> float:
        return float(np.sum(self.weights * fn(self.nodes)))


def make_measure(lam: float) -> MeixnerClassMeasure:
    return MeixnerClassMeasure(lam)


def _check_mass(m: MeixnerClassMeasure) -> None:
    if m.kind != "gamma" and abs(m.mass - 1.0) > MASS_TOL:
        raise QuadratureError(f"ν_{m.lam:g} rule has mass {m.mass!r}; window or atom count too small")


def measure_moment(m: MeixnerClassMeasure, k: int) -> float:
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    _check_mass(m)
    return m.integrate(lambda s: s**k)


def orthonormality_matrix(lam: float, n_max: int) -> np.ndarray:
    m = make_measure(lam)
    _check_mass(m)
    p = poly_table(lam, n_max, m.nodes)
    return (p * m.weights) @ p.T


def orthonormality_residual(lam: float, n_max: int) -> float:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    gram = orthonormality_matrix(lam, n_max)
    return float(np.max(np.abs(gram - np.eye(n_max + 1))))
