"""Shared fixtures."""

import json
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest
from click.testing import CliRunner

from spectraforge.core.linalg import HermitianMatrix
from spectraforge.core.models import ScalarField

TRINE = np.array([
    [1.0, -0.5, -0.5],
    [-0.5, 1.0, -0.5],
    [-0.5, -0.5, 1.0],
])


def random_hermitian(rng: np.random.Generator, n: int, field: ScalarField) -> np.ndarray:
    g = rng.standard_normal((n, n))
    if field is ScalarField.COMPLEX:
        g = g + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2.0


def random_psd(rng: np.random.Generator, n: int, rank: int, field: ScalarField) -> np.ndarray:
    v = rng.standard_normal((n, rank))
    if field is ScalarField.COMPLEX:
        v = v + 1j * rng.standard_normal((n, rank))
    return v @ v.conj().T


def random_unitary(rng: np.random.Generator, n: int, field: ScalarField) -> np.ndarray:
    g = rng.standard_normal((n, n))
    if field is ScalarField.COMPLEX:
        g = g + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def trine() -> HermitianMatrix:
    return HermitianMatrix.from_array(TRINE, ScalarField.REAL)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def write_document(tmp_path: Path) -> Callable[[str, Dict[str, Any]], Path]:
    """Write a JSON document under tmp_path and return its path."""

    def write(name: str, document: Dict[str, Any]) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
