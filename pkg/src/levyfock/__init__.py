"""Grid-discretized white-noise Fock spaces, Wick calculus and Lévy samplers."""
from .extfock import PartitionAlpha, adjointness_residual, ext_gram, ext_inner, ext_pairing, partitions
from .grid import GridFunction, GridModel, HermiteScale, hermite_scale, make_grid
from .ladder import (
    NoiseFamily,
    TruncatedOperator,
    annihilate,
    create,
    double_annihilate,
    field_matrix,
    neutral,
)
from .levysim import charfn_theory, mc_cumulant, mc_pairing, sample_increments
from .orthopoly import make_measure, orthonormality_residual, poly_eval
from .swn import swn_generators, swn_relation_residuals
from .symtensor import FockVector, SymTensor, plain_inner, sym_product, symmetrize
from .wickcalc import s_transform, wick_compose, wick_product
from .wickpow import growth_profile, wick_power

__all__ = [
    "FockVector", "GridFunction", "GridModel", "HermiteScale", "NoiseFamily", "PartitionAlpha",
    "SymTensor", "TruncatedOperator", "adjointness_residual", "annihilate", "charfn_theory", "create",
    "double_annihilate", "ext_gram", "ext_inner", "ext_pairing", "field_matrix", "growth_profile",
    "hermite_scale", "make_grid", "make_measure", "mc_cumulant", "mc_pairing", "neutral",
    "orthonormality_residual", "partitions", "plain_inner", "poly_eval", "s_transform",
    "sample_increments", "swn_generators", "swn_relation_residuals", "sym_product", "symmetrize",
    "wick_compose", "wick_power", "wick_product",
]
