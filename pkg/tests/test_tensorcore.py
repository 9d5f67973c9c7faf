import numpy as np
import pytest

from app.core.config import settings
import scipy.sparse as sp

from app.core.exceptions import (
    DenseCapExceededError,
    DimensionMismatchError,
    DimensionOverflowError,
    ValidationException,
)
from app.services.tensorcore import (
    SparseComplexMatrix,
    from_dense,
    identity_padded_embed,
    is_power_of_two,
    kron,
    kron_all,
    matvec,
    next_power_of_two,
    pad_to_power_of_two,
)


def test_canonical_order_and_zero_drop():
    """Entradas ficam ordenadas por (linha, coluna) e zeros são descartados"""
    m = SparseComplexMatrix(3, 3, [2, 0, 1, 0], [0, 2, 1, 0], [5.0, 1.0, 0.0, 2.0])

    assert m.entries == [(0, 0, 2 + 0j), (0, 2, 1 + 0j), (2, 0, 5 + 0j)]
    assert m.nnz == 3


def test_duplicate_entry_is_rejected():
    with pytest.raises(ValidationException) as exc_info:
        SparseComplexMatrix(2, 2, [0, 0], [1, 1], [1.0, 2.0])
    assert "entries" in exc_info.value.field_errors


def test_out_of_range_index_names_entry():
    with pytest.raises(ValidationException) as exc_info:
        SparseComplexMatrix(2, 2, [0, 5], [0, 0], [1.0, 1.0])
    assert "entries[1]" in exc_info.value.field_errors


def test_dense_conversion_is_inverse(random_complex):
    dense = random_complex(8)
    assert np.array_equal(from_dense(dense).to_dense(), dense)


def test_kron_matches_numpy(random_complex):
    a, b = random_complex(2), random_complex(4)
    result = kron(from_dense(a), from_dense(b))

    assert result.shape == (8, 8)
    assert np.allclose(result.to_dense(), np.kron(a, b))


def test_kron_with_zero_factor_is_zero():
    zero = SparseComplexMatrix.zeros(2, 3)
    result = kron(zero, SparseComplexMatrix.identity(4))
    assert result.shape == (8, 12)
    assert result.nnz == 0


def test_kron_all_requires_factors():
    with pytest.raises(DimensionMismatchError):
        kron_all([])


def test_identity_padded_embed():
    """I ⊗ m ⊗ I com d = 2"""
    m = from_dense(np.array([[0.0, 1.0], [1.0, 0.0]]))
    embedded = identity_padded_embed(m, 1, 1, 2)
    expected = np.kron(np.kron(np.eye(2), m.to_dense()), np.eye(2))

    assert embedded.shape == (8, 8)
    assert np.array_equal(embedded.to_dense(), expected)


def test_identity_padded_embed_without_copies_returns_input():
    m = from_dense(np.array([[1.0, 2.0]]))
    assert identity_padded_embed(m, 0, 0, 3) == m


def test_dimension_overflow(monkeypatch):
    monkeypatch.setattr(settings, "MAX_DIMENSION", 16)
    big = SparseComplexMatrix.identity(8)
    with pytest.raises(DimensionOverflowError):
        kron(big, big)


def test_matvec():
    m = from_dense(np.array([[1.0, 2.0], [0.0, 1j]]))
    assert np.allclose(matvec(m, [1.0, 1.0]), [3.0, 1j])
    with pytest.raises(DimensionMismatchError):
        matvec(m, [1.0, 2.0, 3.0])


def test_add_and_scale():
    a = SparseComplexMatrix.identity(2)
    b = from_dense(np.array([[0.0, 1.0], [1.0, -1.0]]))
    total = a + b.scale(2.0)
    assert np.array_equal(total.to_dense(), np.array([[1, 2], [2, -1]], dtype=complex))
    # entrada (1, 1) cancela e sai da lista
    z = from_dense(np.diag([1.0, -1.0]))
    assert (a + z).entries == [(0, 0, 2 + 0j)]


@pytest.mark.parametrize("value, expected", [(1, 1), (2, 2), (3, 4), (5, 8), (16, 16)])
def test_next_power_of_two(value, expected):
    assert next_power_of_two(value) == expected
    assert is_power_of_two(expected)


def test_pad_to_power_of_two_keeps_entries():
    m = SparseComplexMatrix.from_entries(3, 3, [(0, 0, 1.0), (2, 1, -1.0)])
    padded = pad_to_power_of_two(m)
    assert padded.shape == (4, 4)
    assert padded.entries == m.entries


def _integer_matrix(rng, rows, cols):
    return from_dense(rng.integers(-3, 4, size=(rows, cols)) + 1j * rng.integers(-3, 4, size=(rows, cols)))


def test_kron_is_associative():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a, b, c = (_integer_matrix(rng, *rng.integers(1, 4, size=2)) for _ in range(3))
        left, right = kron(kron(a, b), c), kron(a, kron(b, c))

        assert left == right
        assert left == kron_all([a, b, c])


@pytest.mark.parametrize("d", [1, 2, 3])
def test_identity_padded_embed_matches_explicit_kron(d):
    rng = np.random.default_rng(d)
    m = _integer_matrix(rng, 2, 3)
    for left in range(4):
        for right in range(4):
            expected = sp.kron(
                sp.kron(sp.identity(d ** left), m.to_scipy()), sp.identity(d ** right), format="csr"
            )
            embedded = identity_padded_embed(m, left, right, d)

            assert embedded.shape == expected.shape
            assert abs(embedded.to_scipy() - expected).max() == 0


def test_identity_padded_embed_with_scalar_block():
    m = SparseComplexMatrix.from_entries(1, 1, [(0, 0, 2.5 - 1j)])
    assert identity_padded_embed(m, 2, 1, 1) == m


def test_embed_of_ladder_operators():
    sigma_plus = SparseComplexMatrix.from_entries(2, 2, [(0, 1, 1.0)])
    projector = SparseComplexMatrix.from_entries(2, 2, [(0, 0, 1.0)])

    assert kron(sigma_plus, sigma_plus).entries == [(0, 3, 1 + 0j)]
    embedded = identity_padded_embed(projector, 1, 0, 2)
    assert np.array_equal(embedded.to_dense(), np.diag([1, 0, 1, 0]).astype(complex))


def test_to_dense_respects_qubit_cap(monkeypatch):
    monkeypatch.setattr(settings, "DENSE_QUBIT_CAP", 2)
    assert SparseComplexMatrix.identity(4).to_dense().shape == (4, 4)
    with pytest.raises(DenseCapExceededError) as exc_info:
        SparseComplexMatrix.identity(8).to_dense()
    assert exc_info.value.details == {"qubits": 3, "cap": 2}


def test_allclose_stays_sparse_above_the_cap(monkeypatch):
    monkeypatch.setattr(settings, "DENSE_QUBIT_CAP", 2)
    big = SparseComplexMatrix.identity(16)
    assert big.allclose(big.scale(1 + 1e-14))
    assert not big.allclose(big.scale(2.0))
