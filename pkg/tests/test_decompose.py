import numpy as np
import pytest

from app.core.exceptions import NonPowerOfTwoError, ValidationException
from app.services.decompose import (
    Basis,
    PauliSymbol as P,
    SigmaSymbol as S,
    Term,
    TermDecomposition,
    format_string,
    get_strategy,
    merge_identity_pairs,
    parse_string,
    pauli_decompose,
    reconstruct,
    sigma_decompose,
    term_count_study,
    term_matrix,
)
from app.services.tensorcore import SparseComplexMatrix, from_dense


def _as_dict(d: TermDecomposition) -> dict:
    return {format_string(t.symbols): t.coefficient for t in d.terms}


def test_pauli_decomposition_of_coupled_h(coupled_h):
    d = pauli_decompose(coupled_h)

    assert [format_string(t.symbols) for t in d.terms] == ["IZ", "XX", "YY", "ZI"]
    assert np.allclose(d.coefficients, [0.5, 0.25, -0.25, 0.5])
    assert d.one_norm == pytest.approx(1.5)


def test_sigma_decomposition_of_coupled_h(coupled_h):
    d = sigma_decompose(coupled_h)

    assert _as_dict(d) == {
        "PM,PM": 1.0,
        "PLUS,PLUS": 0.5,
        "MINUS,MINUS": 0.5,
        "MP,MP": -1.0,
    }
    assert d.one_norm == pytest.approx(3.0)


def test_diagonal_matrix_in_both_bases(diagonal_a):
    pauli = _as_dict(pauli_decompose(diagonal_a))
    sigma = _as_dict(sigma_decompose(diagonal_a))

    assert pauli == pytest.approx({"II": 2.25, "IZ": -1.25, "ZI": -1.25, "ZZ": 2.25})
    assert sigma == {"PM,PM": 2.0, "MP,MP": 7.0}
    assert sigma_decompose(diagonal_a).one_norm == pytest.approx(9.0)


@pytest.mark.parametrize("fixture, pauli_terms, sigma_terms", [
    ("diagonal_a", 4, 2),
    ("first_column_a", 12, 7),
    ("lower_triangular_a", 16, 10),
])
def test_term_counts(request, fixture, pauli_terms, sigma_terms):
    matrix = request.getfixturevalue(fixture)
    assert len(pauli_decompose(matrix)) == pauli_terms
    assert len(sigma_decompose(matrix)) == sigma_terms


@pytest.mark.parametrize("dim", [2, 4, 8, 16])
def test_reconstruction_is_exact(random_complex, dim):
    h = from_dense(random_complex(dim))
    for basis in Basis:
        rebuilt = reconstruct(get_strategy(basis).decompose(h))
        assert np.allclose(rebuilt.to_dense(), h.to_dense(), atol=1e-12)


def test_sigma_terms_follow_entry_order(random_complex):
    h = from_dense(random_complex(8, density=0.3))
    d = sigma_decompose(h)
    assert [t.coefficient for t in d.terms] == [v for _, _, v in h.entries]


def test_pauli_terms_are_sorted():
    h = from_dense(np.array([[0, 1j], [2, 3]]))
    order = [format_string(t.symbols) for t in pauli_decompose(h).terms]
    assert order == sorted(order, key=lambda s: ["IXYZ".index(ch) for ch in s])


def test_hermitian_matrix_has_real_pauli_coefficients(random_complex):
    a = random_complex(8)
    h = from_dense(a + a.conj().T)
    assert all(abs(c.imag) < 1e-12 for c in pauli_decompose(h).coefficients)


def test_zero_matrix_has_no_terms():
    zero = SparseComplexMatrix.zeros(4, 4)
    assert len(pauli_decompose(zero)) == 0
    assert len(sigma_decompose(zero)) == 0


def test_non_power_of_two_is_rejected():
    with pytest.raises(NonPowerOfTwoError):
        pauli_decompose(SparseComplexMatrix.identity(3))
    with pytest.raises(NonPowerOfTwoError):
        sigma_decompose(SparseComplexMatrix.zeros(2, 4))


def test_unknown_basis():
    with pytest.raises(ValidationException) as exc_info:
        get_strategy("qutrit")
    assert "basis" in exc_info.value.field_errors


def test_merge_identity_pairs_on_diagonal():
    """diag(c, c) = c·I2"""
    h = from_dense(np.diag([3.0, 3.0, 3.0, 3.0]))
    merged = merge_identity_pairs(sigma_decompose(h))

    assert _as_dict(merged) == {"I2,I2": 3.0}
    assert np.allclose(reconstruct(merged).to_dense(), h.to_dense())


def test_merge_identity_pairs_keeps_unequal_coefficients(diagonal_a):
    d = sigma_decompose(diagonal_a)
    assert merge_identity_pairs(d).terms == d.terms


def test_merge_identity_pairs_mixed_positions():
    h = from_dense(np.array([
        [1.0, 5.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 2.0],
    ]))
    merged = merge_identity_pairs(sigma_decompose(h))

    assert _as_dict(merged) == {"I2,PM": 1.0, "PM,PLUS": 5.0, "MP,MP": 2.0}
    assert np.allclose(reconstruct(merged).to_dense(), h.to_dense())


def test_merge_identity_pairs_requires_sigma(coupled_h):
    with pytest.raises(ValidationException):
        merge_identity_pairs(pauli_decompose(coupled_h))


def test_decomposition_rejects_duplicates_and_zero():
    with pytest.raises(ValidationException):
        TermDecomposition(1, Basis.PAULI, (Term(1.0, (P.X,)), Term(2.0, (P.X,))))
    with pytest.raises(ValidationException):
        TermDecomposition(1, Basis.PAULI, (Term(0.0, (P.Z,)),))
    with pytest.raises(ValidationException):
        TermDecomposition(2, Basis.SIGMA, (Term(1.0, (P.X, P.Y)),))


def test_string_format():
    assert format_string((P.I, P.X, P.Z)) == "IXZ"
    assert format_string((S.PM, S.PLUS, S.I2)) == "PM,PLUS,I2"
    assert parse_string("PM, PLUS,I2", Basis.SIGMA) == (S.PM, S.PLUS, S.I2)
    with pytest.raises(ValidationException):
        parse_string("IXW", Basis.PAULI)


def test_term_matrix_first_symbol_is_most_significant():
    m = term_matrix((S.PLUS, S.MP))
    expected = np.zeros((4, 4))
    expected[1, 3] = 1.0
    assert np.array_equal(m.to_dense(), expected)


def test_term_count_study(diagonal_a, first_column_a, lower_triangular_a):
    table = term_count_study([
        ("A1", diagonal_a),
        ("A2", first_column_a),
        ("A3", lower_triangular_a),
    ])

    assert list(table.columns) == ["label", "dim", "nnz", "pauli_terms", "sigma_terms"]
    assert table.to_dict("records") == [
        {"label": "A1", "dim": 4, "nnz": 2, "pauli_terms": 4, "sigma_terms": 2},
        {"label": "A2", "dim": 4, "nnz": 7, "pauli_terms": 12, "sigma_terms": 7},
        {"label": "A3", "dim": 4, "nnz": 10, "pauli_terms": 16, "sigma_terms": 10},
    ]


def test_term_count_study_pads_non_square_sizes():
    m = SparseComplexMatrix.from_entries(3, 3, [(0, 0, 1.0), (2, 2, 1.0)])
    row = term_count_study([("pad", m)]).iloc[0]
    assert row["dim"] == 4
    assert row["sigma_terms"] == 2


def test_sigma_term_counts_over_random_sparse_matrices():
    """Sem fusão: um termo por não nulo; com fusão: nunca mais que isso"""
    rng = np.random.default_rng(31)
    for _ in range(200):
        dim = 2 ** int(rng.integers(1, 4))
        dense = rng.integers(-2, 3, size=(dim, dim)) * (rng.random((dim, dim)) < 0.4)
        h = from_dense(dense.astype(complex))

        plain = sigma_decompose(h)
        merged = merge_identity_pairs(plain)

        assert len(plain) == h.nnz
        assert len(merged) <= h.nnz
        assert np.allclose(reconstruct(merged).to_dense(), h.to_dense(), atol=1e-12)


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_dense_matrix_needs_every_pauli_string(random_complex, dim):
    d = pauli_decompose(from_dense(random_complex(dim, density=1.0)))
    assert len(d) == dim ** 2
