"""Square-of-white-noise generators in the extended Fock representation.

B(φ) = 2(a⁻ + a₁⁻)(φ), B†(φ) = 2a⁺(φ), N(φ) = 2a⁰(φ).  The
renormalized δ² = cδ enters only through the double-annihilation
term, which fixes c = 2 independently of the grid width.
"""
from __future__ import annotations

from dataclasses import dataclass

from .grid import GridFunction, l2_inner
from .ladder import (
    TruncatedOperator,
    annihilation_matrix,
    commutator_defect,
    creation_matrix,
    double_annihilation_matrix,
    neutral_matrix,
)

RENORMALIZATION_CONSTANT = 2.0


@dataclass(frozen=True, eq=False)
class SWNGenerators:
    B: TruncatedOperator
    B_dag: TruncatedOperator
    N: TruncatedOperator


def swn_generators(phi: GridFunction, max_rank: int) -> SWNGenerators:
    if max_rank < 2:
        raise ValueError("max_rank must be at least 2")
    lower = annihilation_matrix(phi, max_rank) + double_annihilation_matrix(phi, max_rank)
    return SWNGenerators(
        B=2.0 * lower,
        B_dag=2.0 * creation_matrix(phi, max_rank),
        N=2.0 * neutral_matrix(phi, max_rank),
    )


@dataclass(frozen=True)
class RelationResidual:
    name: str
    residual: float
    defect: float
    scale: float


def swn_relation_residuals(phi: GridFunction, psi: GridFunction, max_rank: int) -> list[RelationResidual]:
    """Residuals of the six smeared relations on ranks 0..max_rank-2.

    Each residual is ‖[X,Y] − E‖_F / max(1, ‖E‖_F).
    """
    if max_rank < 3:
        raise ValueError("max_rank must be at least 3 to leave a leak-free rank")
    N = max_rank
    g1, g2 = swn_generators(phi, N), swn_generators(psi, N)
    prod = swn_generators(phi * psi, N)
    c = RENORMALIZATION_CONSTANT
    zero = TruncatedOperator.zeros(phi.grid, N)
    ident = TruncatedOperator.identity(phi.grid, N, 2.0 * c * l2_inner(phi, psi))
    checks = [
        ("[B,B†]=2c<φ,ψ>+4N(φψ)", g1.B, g2.B_dag, ident + 4.0 * prod.N),
        ("[N,B†]=2B†(φψ)", g1.N, g2.B_dag, 2.0 * prod.B_dag),
        ("[N,B]=-2B(φψ)", g1.N, g2.B, -2.0 * prod.B),
        ("[N,N]=0", g1.N, g2.N, zero),
        ("[B,B]=0", g1.B, g2.B, zero),
        ("[B†,B†]=0", g1.B_dag, g2.B_dag, zero),
    ]
    out = []
    ranks = range(N - 1)
    for name, x, y, expected in checks:
        defect, scale = commutator_defect(x, y, expected, ranks)
        out.append(RelationResidual(name, defect / max(1.0, scale), defect, scale))
    return out
