"""Core extremality machinery: linear algebra, spectrahedra, rank tests and correlation matrices."""

from .linalg import HermitianMatrix, eigh, is_psd, numerical_rank, psd_power, schatten_norm
from .models import ExtremalityReport, MembershipReport, RankDecision, ScalarField
from .spectrahedron import Spectrahedron, build_spectrahedron, membership, symmetrize_constraint

__all__ = [
    "HermitianMatrix",
    "eigh",
    "psd_power",
    "numerical_rank",
    "schatten_norm",
    "is_psd",
    "ScalarField",
    "RankDecision",
    "MembershipReport",
    "ExtremalityReport",
    "Spectrahedron",
    "build_spectrahedron",
    "membership",
    "symmetrize_constraint",
]
