"""
Matrix and spectrahedron JSON codec.

Matrices are ``{"field": "real"|"complex", "n": <int>, "rows": [[...]]}`` in
row-major order, complex entries as ``[re, im]`` pairs. Floats are written with
Python's shortest round-trip representation, so decoding an encoded matrix
gives back the identical doubles.
"""

from typing import Any, Dict, List, Optional, Union

import numpy as np

from spectraforge.core.linalg import HermitianMatrix
from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import Spectrahedron, build_spectrahedron, custom
from spectraforge.exceptions import ShapeError, ValidationError
from spectraforge.parser.schemas import MATRIX_SCHEMA, SPECTRAHEDRON_SCHEMA
from spectraforge.utils.validators import validate_json_schema, validate_rows


def encode_matrix(
    matrix: Union[HermitianMatrix, np.ndarray],
    field: Optional[Union[ScalarField, str]] = None
) -> Dict[str, Any]:
    """Encode a square matrix in the corpus matrix format."""
    if isinstance(matrix, HermitianMatrix):
        data = matrix.data
        field = field or matrix.field
    else:
        data = np.asarray(matrix)
        if field is None:
            field = ScalarField.COMPLEX if np.iscomplexobj(data) else ScalarField.REAL
    field = ScalarField(field)

    if field is ScalarField.COMPLEX:
        data = data.astype(np.complex128)
        rows: List[List[Any]] = [
            [[float(z.real), float(z.imag)] for z in row] for row in data
        ]
    else:
        rows = [[float(x) for x in row] for row in np.real(data)]
    return {"field": field.value, "n": int(data.shape[0]), "rows": rows}


def decode_array(document: Dict[str, Any]) -> np.ndarray:
    """Decode a matrix document to a raw array (no Hermitian check)."""
    validate_json_schema(document, MATRIX_SCHEMA, "matrix")
    n = document["n"]
    rows = document["rows"]
    validate_rows(rows, n)
    if document["field"] == ScalarField.COMPLEX.value:
        data = np.empty((n, n), dtype=np.complex128)
        for i, row in enumerate(rows):
            for j, entry in enumerate(row):
                data[i, j] = complex(entry[0], entry[1]) if isinstance(entry, list) else complex(entry)
        return data
    if any(isinstance(entry, list) for row in rows for entry in row):
        raise ValidationError("Real-field matrix holds [re, im] entries")
    return np.array(rows, dtype=np.float64).reshape(n, n)


def decode_matrix(document: Dict[str, Any]) -> HermitianMatrix:
    """Decode a matrix document to a HermitianMatrix, rejecting asymmetric input."""
    return HermitianMatrix.from_array(decode_array(document), document["field"])


def encode_spectrahedron(spectrahedron: Spectrahedron) -> Dict[str, Any]:
    """Encode a Spectrahedron in the spectrahedron JSON format."""
    return {
        "field": spectrahedron.field.value,
        "n": spectrahedron.n,
        "constraints": [
            {"label": c.label, "A": encode_matrix(c.matrix), "c": float(c.target)}
            for c in spectrahedron.constraints
        ],
    }


def decode_spectrahedron(document: Dict[str, Any]) -> Spectrahedron:
    """
    Decode a spectrahedron document.

    Besides explicit constraint lists, ``{"kind": "elliptope"|"density", "n": .., "field": ..}``
    builds the canonical families.
    """
    validate_json_schema(document, SPECTRAHEDRON_SCHEMA, "spectrahedron")
    field = document["field"]
    if "constraints" not in document:
        return build_spectrahedron(document["kind"], document["n"], field)

    entries = [
        (decode_array(item["A"]), item["c"], item.get("label"))
        for item in document["constraints"]
    ]
    spectrahedron = custom(entries, field)
    if spectrahedron.n != document["n"]:
        raise ShapeError(
            f"Spectrahedron declares n={document['n']} but constraints have n={spectrahedron.n}"
        )
    return spectrahedron
