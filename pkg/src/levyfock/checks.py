"""Seeded verification suites behind ``levyfock verify``.

Every suite returns a list of :class:`Check`; residuals are compared with
a strict ``residual < tol``.  Monte Carlo checks report z-scores
(|estimate − target| / standard error) against a tolerance of 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extfock import adjointness_residual, ext_inner, partitions
from .grid import GridFunction, GridModel, l2_inner
from .ladder import (
    NoiseFamily,
    TruncatedOperator,
    annihilation_matrix,
    ccr_expected,
    commutator_residual,
    creation_matrix,
    double_annihilation_matrix,
    neutral_matrix,
)
from .levysim import chaos_prediction, cumulant_theory, mc_cumulant, mc_pairing
from .orthopoly import make_measure, orthonormality_residual
from .swn import swn_relation_residuals
from .symtensor import FockVector, SymTensor
from .wickcalc import s_transform, wick_product

PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tol)

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tol": self.tol, "pass": self.passed}


def random_function(grid: GridModel, rng: np.random.Generator) -> GridFunction:
    return GridFunction(grid, rng.standard_normal(grid.cells))


def random_tensor(grid: GridModel, rank: int, rng: np.random.Generator) -> SymTensor:
    return SymTensor(grid, rank, rng.standard_normal(math.comb(grid.cells + rank - 1, rank)))


def random_fockvec(grid: GridModel, max_rank: int, rng: np.random.Generator) -> FockVector:
    return FockVector(grid, tuple(random_tensor(grid, n, rng) for n in range(max_rank + 1)))


def suite_ccr(grid: GridModel, rank: int, seed: int, pairs: int = 10, tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    N = rank
    low = range(N)
    out = []
    for k in range(pairs):
        phi, psi = random_function(grid, rng), random_function(grid, rng)
        am, ap = annihilation_matrix(phi, N), creation_matrix(psi, N)
        out += [
            Check(f"pair{k}:[a-,a+]=(phi,psi)I", commutator_residual(am, ap, ccr_expected(phi, psi, N), low), tol),
            Check(f"pair{k}:[a0,a+]=a+(phi*psi)",
                  commutator_residual(neutral_matrix(phi, N), ap, creation_matrix(phi * psi, N), low), tol),
            Check(f"pair{k}:[a0,a-]=-a-(phi*psi)",
                  commutator_residual(neutral_matrix(phi, N), annihilation_matrix(psi, N),
                                      -annihilation_matrix(phi * psi, N), range(N + 1)), tol),
            Check(f"pair{k}:[a1-,a+]=2a0(phi*psi)",
                  commutator_residual(double_annihilation_matrix(phi, N), ap,
                                      2.0 * neutral_matrix(phi * psi, N), low), tol),
            Check(f"pair{k}:[a+,a+]=0",
                  commutator_residual(creation_matrix(phi, N), ap, TruncatedOperator.zeros(grid, N), range(N - 1)), tol),
            Check(f"pair{k}:[a-,a-]=0",
                  commutator_residual(am, annihilation_matrix(psi, N), TruncatedOperator.zeros(grid, N), range(N + 1)), tol),
        ]
    return out


def suite_extfock(grid: GridModel, rank: int, seed: int, trials: int = 20, tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    one = GridModel(1, 1.0)
    hand = adjointness_residual(GridFunction.constant(one), SymTensor.constant(one, 1), SymTensor.constant(one, 2))
    out.append(Check("hand case d=1 h=1", hand, min(tol, 1e-12)))
    for k in range(trials):
        n = int(rng.integers(0, max(1, rank)))
        phi = random_function(grid, rng)
        f, g = random_tensor(grid, n, rng), random_tensor(grid, n + 1, rng)
        out.append(Check(f"adjointness trial {k} (n={n})", adjointness_residual(phi, f, g), tol))
    for n in range(9):
        unit = SymTensor.constant(one, n)
        out.append(Check(f"ext_inner unit rank {n} = n!", abs(ext_inner(unit, unit) - math.factorial(n)), tol))
    for n, expected in enumerate(PARTITION_COUNTS):
        out.append(Check(f"partition count p({n})", float(abs(len(partitions(n)) - expected)), tol))
    return out


def suite_swn(grid: GridModel, rank: int, seed: int, tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    phi, psi = random_function(grid, rng), random_function(grid, rng)
    return [Check(r.name, r.residual, tol) for r in swn_relation_residuals(phi, psi, rank)]


def suite_ortho(tol: float = 1e-6) -> list[Check]:
    out = [
        Check("orthonormality lambda=0", orthonormality_residual(0.0, 6), tol),
        Check("orthonormality lambda=2", orthonormality_residual(2.0, 6), tol),
        Check("orthonormality lambda=3", orthonormality_residual(3.0, 6), min(tol, 1e-8)),
    ]
    for lam in (2.5, 3.0, 5.0):
        out.append(Check(f"pascal mass lambda={lam:g}", abs(make_measure(lam).mass - 1.0), min(tol, 1e-12)))
    for lam in (0.0, 1.0, 2.0, 3.0):
        m = make_measure(lam)
        var = m.integrate(lambda s: s * s) - m.integrate(lambda s: s) ** 2
        out.append(Check(f"variance 2 lambda={lam:g}", abs(var - 2.0), tol))
    return out


def suite_wick(grid: GridModel, rank: int, seed: int, pairs: int = 5, points: int = 10, tol: float = 1e-12) -> list[Check]:
    rng = np.random.default_rng(seed)
    top = min(rank, 3)
    out = []
    for k in range(pairs):
        F, G = random_fockvec(grid, top, rng), random_fockvec(grid, top, rng)
        H = random_fockvec(grid, top, rng)
        FG = wick_product(F, G, max_rank=2 * top)
        worst = 0.0
        for _ in range(points):
            xi = random_function(grid, rng)
            lhs, rhs = s_transform(FG, xi), s_transform(F, xi) * s_transform(G, xi)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        out.append(Check(f"pair{k}: S(F<>G)=SF*SG", worst, tol))
        comm = np.max([np.max(np.abs(a.values - b.values)) for a, b in zip(FG, wick_product(G, F, max_rank=2 * top))])
        out.append(Check(f"pair{k}: commutative", float(comm), tol))
        left, right = wick_product(FG, H), wick_product(F, wick_product(G, H))
        scale = max(1.0, max(np.max(np.abs(a.values)) for a in left))
        assoc = max(np.max(np.abs(a.values - b.values)) for a, b in zip(left, right)) / scale
        out.append(Check(f"pair{k}: associative", float(assoc), tol))
        unit = wick_product(F, FockVector.vacuum(grid))
        out.append(Check(f"pair{k}: unit", float(max(np.max(np.abs(a.values - b.values)) for a, b in zip(unit, F))), tol))
    return out


def suite_mc(grid: GridModel, seed: int, paths: int = 20_000, tol: float = 3.0) -> list[Check]:
    families = [NoiseFamily.gaussian(), NoiseFamily.poisson(1.0), NoiseFamily.meixner(2.0), NoiseFamily.meixner(3.0)]
    phi = GridFunction.constant(grid)
    out = []
    for i, fam in enumerate(families):
        for k in (2, 3):
            est = mc_cumulant(fam, phi, k, paths, seed + i)
            target = cumulant_theory(fam, phi, k)
            out.append(Check(f"{fam}: kappa{k} z-score", abs(est.mean - target) / est.std_error, tol))
    rng = np.random.default_rng(seed)
    for fam in (NoiseFamily.meixner(2.0), NoiseFamily.poisson(1.0)):
        for m, n in ((1, 2), (2, 2), (1, 1)):
            f, g = random_tensor(grid, m, rng), random_tensor(grid, n, rng)
            est = mc_pairing(fam, f, g, paths, seed + 10 * m + n)
            target = chaos_prediction(fam, f, g)
            out.append(Check(f"{fam}: pairing ({m},{n}) z-score", abs(est.mean - target) / est.std_error, tol))
    return out


SUITES = ("ccr", "extfock", "swn", "ortho", "wick", "mc")
DEFAULT_TOL = {"ccr": 1e-10, "extfock": 1e-10, "swn": 1e-10, "ortho": 1e-6, "wick": 1e-12, "mc": 3.0}


def run_suite(name: str, grid: GridModel, rank: int, seed: int, tol: float | None = None,
              paths: int | None = None) -> list[Check]:
    t = DEFAULT_TOL[name] if tol is None else tol
    if name == "ccr":
        return suite_ccr(grid, rank, seed, tol=t)
    if name == "extfock":
        return suite_extfock(grid, rank, seed, tol=t)
    if name == "swn":
        return suite_swn(grid, rank, seed, tol=t)
    if name == "ortho":
        return suite_ortho(tol=t)
    if name == "wick":
        return suite_wick(grid, rank, seed, tol=t)
    if name == "mc":
        return suite_mc(grid, seed, paths=paths or 20_000, tol=t)
    raise KeyError(name)
