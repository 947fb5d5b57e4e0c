"""Document loading and the matrix/spectrahedron JSON codec."""

from .codec import decode_matrix, decode_spectrahedron, encode_matrix, encode_spectrahedron
from .loader import load_document, load_matrix, load_problem, load_spectrahedron, validate_problem

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "encode_spectrahedron",
    "decode_spectrahedron",
    "load_document",
    "load_matrix",
    "load_spectrahedron",
    "load_problem",
    "validate_problem",
]
