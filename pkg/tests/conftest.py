import json
from pathlib import Path

import numpy as np
import pytest

from app.services.tensorcore import SparseComplexMatrix, from_dense


def matrix_payload(matrix: SparseComplexMatrix) -> dict:
    """Documento JSON de matriz no formato lido pela CLI."""
    return {
        "rows": matrix.rows,
        "cols": matrix.cols,
        "entries": [[r, c, v.real, v.imag] for r, c, v in matrix.entries],
    }


@pytest.fixture
def write_json(tmp_path):
    """Grava um dicionário como JSON em tmp_path e devolve o caminho"""
    def _write(name: str, payload: dict) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def coupled_h() -> SparseComplexMatrix:
    """Hamiltoniano 4x4 com acoplamento entre |00⟩ e |11⟩"""
    return from_dense(np.array([
        [1.0, 0.0, 0.0, 0.5],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, -1.0],
    ]))


@pytest.fixture
def diagonal_a() -> SparseComplexMatrix:
    return from_dense(np.diag([2.0, 0.0, 0.0, 7.0]))


@pytest.fixture
def first_column_a() -> SparseComplexMatrix:
    """Primeira coluna cheia mais a última linha (7 não nulos)"""
    return from_dense(np.array([
        [1.0, 0.0, 0.0, 0.0],
        [4.0, 0.0, 0.0, 0.0],
        [2.0, 0.0, 0.0, 0.0],
        [1.0, -2.0, 1.0, -1.0],
    ]))


@pytest.fixture
def lower_triangular_a() -> SparseComplexMatrix:
    return from_dense(np.array([
        [1.0, 0.0, 0.0, 0.0],
        [4.0, 3.0, 0.0, 0.0],
        [2.0, -2.0, 2.0, 0.0],
        [1.0, 1.0, -1.0, 1.0],
    ]))


@pytest.fixture
def random_complex():
    """Gerador de matrizes complexas densas reprodutíveis"""
    rng = np.random.default_rng(7)

    def _make(dim: int, density: float = 0.5) -> np.ndarray:
        values = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        mask = rng.random((dim, dim)) < density
        return np.where(mask, values, 0.0)

    return _make
