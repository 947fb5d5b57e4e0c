"""
Document loader module.

Reads matrix, spectrahedron and problem-definition documents from JSON or YAML
files and validates them against their schemas before decoding.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from spectraforge.constants import STUDY_PCA_COVER, STUDY_QUANTUM_MOMENTS
from spectraforge.core.linalg import HermitianMatrix
from spectraforge.core.spectrahedron import Spectrahedron
from spectraforge.exceptions import ResourceNotFoundError, ValidationError
from spectraforge.logger import get_logger
from spectraforge.parser.codec import decode_matrix, decode_spectrahedron
from spectraforge.parser.schemas import ENTROPY_PROBLEM_SCHEMA, PCA_PROBLEM_SCHEMA
from spectraforge.utils.validators import validate_json_schema

logger = get_logger(__name__)

_YAML_SUFFIXES = {".yaml", ".yml"}


def load_document(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a JSON or YAML document.

    Args:
        path: File path; ``.yaml``/``.yml`` files are parsed as YAML, everything else as JSON

    Returns:
        Dict[str, Any]: The parsed document

    Raises:
        ResourceNotFoundError: If the file does not exist
        ValidationError: If the content cannot be parsed or is not an object
    """
    path = Path(path)
    if not path.is_file():
        raise ResourceNotFoundError(f"Input file not found: {path}")

    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() in _YAML_SUFFIXES:
            document = yaml.safe_load(text)
        else:
            document = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ValidationError(f"Failed to parse {path}: {e}") from e

    if not isinstance(document, dict):
        raise ValidationError(f"{path} must contain an object at the top level")

    logger.debug(f"Loaded document {path}", extra={"size_bytes": len(text)})
    return document


def load_matrix(path: Union[str, Path]) -> HermitianMatrix:
    """Load a matrix document as a HermitianMatrix."""
    return decode_matrix(load_document(path))


def load_spectrahedron(path: Union[str, Path]) -> Spectrahedron:
    """Load a spectrahedron document."""
    return decode_spectrahedron(load_document(path))


def load_problem(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load and validate a problem-definition document for one of the two studies.

    Raises:
        ValidationError: If the study is unknown or the document fails its schema
    """
    return validate_problem(load_document(path))


def validate_problem(document: Dict[str, Any]) -> Dict[str, Any]:
    """
    Validate a problem definition against the schema of its study.

    Raises:
        ValidationError: If the study is unknown or the document fails its schema
    """
    study = document.get("study")
    if study == STUDY_PCA_COVER:
        validate_json_schema(document, PCA_PROBLEM_SCHEMA, "PCA cover problem")
    elif study == STUDY_QUANTUM_MOMENTS:
        validate_json_schema(document, ENTROPY_PROBLEM_SCHEMA, "quantum moment problem")
    else:
        raise ValidationError(
            f"Unknown study '{study}'; expected '{STUDY_PCA_COVER}' or '{STUDY_QUANTUM_MOMENTS}'"
        )
    return document
