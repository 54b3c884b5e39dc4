"""Computations with finite-dimensional algebras over F_p and their module
categories: almost split sequences, perfect exact sequences, the eta-chain,
Kato complexes, Gorenstein projectives and Morita-type checks."""

from .algebra import Algebra, QuiverPresentation, envelope, from_quiver, opposite
from .modules import Module, ModuleHom, direct_sum, from_representation, principal_projective, simple_module
from .sequences import ShortExactSeq, is_perfect

__all__ = [
    "Algebra",
    "QuiverPresentation",
    "from_quiver",
    "opposite",
    "envelope",
    "Module",
    "ModuleHom",
    "direct_sum",
    "from_representation",
    "principal_projective",
    "simple_module",
    "ShortExactSeq",
    "is_perfect",
]

__version__ = "0.1.0"
