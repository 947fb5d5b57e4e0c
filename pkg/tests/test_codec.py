"""Tests for the JSON codec and the document loader."""

import json

import numpy as np
import pytest
import yaml

from spectraforge.core.models import ScalarField
from spectraforge.core.spectrahedron import custom, elliptope
from spectraforge.exceptions import (
    AsymmetryError,
    ResourceNotFoundError,
    ShapeError,
    ValidationError,
)
from spectraforge.parser import (
    decode_matrix,
    decode_spectrahedron,
    encode_matrix,
    encode_spectrahedron,
    load_document,
    load_matrix,
    load_problem,
    load_spectrahedron,
    validate_problem,
)

from .conftest import random_hermitian


class TestMatrixCodec:

    @pytest.mark.parametrize("field", [ScalarField.REAL, ScalarField.COMPLEX])
    def test_decoding_is_bit_identical(self, rng, field):
        m = random_hermitian(rng, 5, field)
        document = json.loads(json.dumps(encode_matrix(m, field)))
        decoded = decode_matrix(document)
        assert decoded.field is field
        np.testing.assert_array_equal(decoded.data, m)

    def test_complex_entries_are_pairs(self):
        document = encode_matrix(np.array([[1.0, 1j], [-1j, 2.0]]))
        assert document["field"] == "complex"
        assert document["n"] == 2
        assert document["rows"][0] == [[1.0, 0.0], [0.0, 1.0]]

    def test_complex_field_accepts_plain_numbers(self):
        m = decode_matrix({"field": "complex", "n": 2, "rows": [[1, [0, 1]], [[0, -1], 1]]})
        np.testing.assert_array_equal(m.data, [[1, 1j], [-1j, 1]])

    @pytest.mark.parametrize("document", [
        {"field": "real", "n": 2},
        {"field": "quaternion", "n": 1, "rows": [[1.0]]},
        {"field": "real", "n": 0, "rows": []},
        {"field": "real", "n": 1, "rows": [["one"]]},
        {"field": "real", "n": 1, "rows": [[[1.0, 0.0]]]},
        {"field": "real", "n": 2, "rows": [[1.0, 0.0]]},
        {"field": "real", "n": 2, "rows": [[1.0, 0.0], [0.0]]},
    ])
    def test_rejects_malformed_documents(self, document):
        with pytest.raises(ValidationError):
            decode_matrix(document)

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(AsymmetryError):
            decode_matrix({"field": "real", "n": 2, "rows": [[1.0, 0.5], [0.0, 1.0]]})


class TestSpectrahedronCodec:

    def test_encode_then_decode(self):
        s = custom([(np.diag([1.0, 0.0]), 1.0, "first"), ([[0.0, 1.0], [1.0, 0.0]], 0.0, "coupling")])
        decoded = decode_spectrahedron(json.loads(json.dumps(encode_spectrahedron(s))))
        assert decoded.labels == ["first", "coupling"]
        np.testing.assert_array_equal(decoded.targets, s.targets)
        np.testing.assert_array_equal(decoded.matrices[1].data, s.matrices[1].data)

    @pytest.mark.parametrize("kind, count", [("elliptope", 4), ("density", 1)])
    def test_kind_documents(self, kind, count):
        s = decode_spectrahedron({"kind": kind, "n": 4, "field": "complex"})
        assert len(s) == count
        assert s.field is ScalarField.COMPLEX

    def test_elliptope_round_trip(self):
        s = decode_spectrahedron(encode_spectrahedron(elliptope(3)))
        assert len(s) == 3
        assert s.n == 3

    def test_rejects_missing_constraints_and_kind(self):
        with pytest.raises(ValidationError):
            decode_spectrahedron({"field": "real", "n": 2})

    def test_rejects_dimension_mismatch(self):
        document = encode_spectrahedron(elliptope(2))
        document["n"] = 3
        with pytest.raises(ShapeError):
            decode_spectrahedron(document)


class TestLoader:

    def test_json_and_yaml(self, tmp_path):
        document = encode_matrix(np.eye(2))
        (tmp_path / "m.json").write_text(json.dumps(document))
        (tmp_path / "m.yaml").write_text(yaml.safe_dump(document))
        np.testing.assert_array_equal(load_matrix(tmp_path / "m.json").data, np.eye(2))
        np.testing.assert_array_equal(load_matrix(tmp_path / "m.yaml").data, np.eye(2))

    def test_spectrahedron_file(self, write_document):
        path = write_document("s.json", {"kind": "elliptope", "n": 3, "field": "real"})
        assert len(load_spectrahedron(path)) == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ResourceNotFoundError):
            load_document(tmp_path / "absent.json")

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError):
            load_document(path)

    def test_top_level_must_be_an_object(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValidationError, match="object"):
            load_document(path)


class TestProblems:

    def test_pca_problem(self, write_document):
        path = write_document("pca.json", {
            "study": "pca_cover",
            "intervals": [[0.0, 1.0]],
            "p": 1,
            "trace_target": 1.0,
            "moments": {"0,0,0": 0.5},
        })
        assert load_problem(path)["p"] == 1

    def test_entropy_problem(self):
        document = {"study": "quantum_moments", "moments": [0.5], "basis_size": 4, "rank_one": True}
        assert validate_problem(document) is document

    def test_unknown_study(self):
        with pytest.raises(ValidationError, match="Unknown study"):
            validate_problem({"study": "portfolio"})

    def test_pca_problem_needs_data(self):
        with pytest.raises(ValidationError):
            validate_problem({"study": "pca_cover", "intervals": [[0.0, 1.0]], "p": 1})

    def test_entropy_problem_basis_size(self):
        with pytest.raises(ValidationError):
            validate_problem({"study": "quantum_moments", "moments": [0.5], "basis_size": 1})
