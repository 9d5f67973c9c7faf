import numpy as np
import pytest

from app.core.exceptions import EmptyDecompositionError, VerificationFailure
from app.services.blockenc import (
    block_encode,
    build_prep,
    build_select,
    build_select_fanout,
    pauli_branch,
    verify_block_encoding,
)
from app.services.circuit import SigmaString, build_uj, sigma_matrix
from app.services.decompose import (
    Basis,
    PauliSymbol as P,
    SigmaSymbol as S,
    merge_identity_pairs,
    sigma_decompose,
    term_matrix,
)
from app.services.simverify import circuit_unitary, extract_block
from app.services.tensorcore import SparseComplexMatrix, from_dense


def test_prep_first_column():
    prep = build_prep([1.0, -3.0, 2j])
    expected = np.sqrt(np.array([1.0, 3.0, 2.0, 0.0]) / 6.0)

    assert prep.qubits == (0, 1)
    assert np.allclose(prep.matrix[:, 0], expected)
    assert np.allclose(prep.matrix.conj().T @ prep.matrix, np.eye(4))


def test_prep_single_coefficient_is_identity():
    assert np.allclose(build_prep([5.0]).matrix, np.eye(1))


def test_prep_requires_nonzero_coefficient():
    with pytest.raises(EmptyDecompositionError):
        build_prep([])


def test_pauli_branch():
    branch = pauli_branch((P.X, P.I, P.Z))
    assert branch.num_qubits == 3
    assert len(branch) == 2
    assert np.allclose(circuit_unitary(branch), term_matrix((P.X, P.I, P.Z)).to_dense())


def test_select_applies_branch_per_index():
    branches = [pauli_branch((P.X,)), pauli_branch((P.Z,)), pauli_branch((P.Y,))]
    u = circuit_unitary(build_select(branches))
    x, z, y = (term_matrix((s,)).to_dense() for s in (P.X, P.Z, P.Y))

    # seleção em 2 qubits; o índice 3 é preenchimento e age como identidade
    for index, expected in enumerate([x, z, y, np.eye(2)]):
        rows = slice(2 * index, 2 * index + 2)
        assert np.allclose(u[rows, rows], expected)


@pytest.mark.parametrize("basis", list(Basis))
@pytest.mark.parametrize("fanout", [False, True])
def test_coupled_h_block(coupled_h, basis, fanout):
    encoding = block_encode(coupled_h, basis, fanout=fanout)
    report = verify_block_encoding(encoding, coupled_h)

    assert report["max_block_error"] < 1e-10
    expected_lambda = 1.5 if basis is Basis.PAULI else 3.0
    assert encoding.normalization == pytest.approx(expected_lambda)


def test_pauli_layout(coupled_h):
    encoding = block_encode(coupled_h, Basis.PAULI)
    assert encoding.selection == (0, 1)
    assert encoding.completion is None
    assert encoding.system == (2, 3)
    assert encoding.num_qubits == 4


def test_sigma_layout(coupled_h):
    encoding = block_encode(coupled_h, Basis.SIGMA)
    assert encoding.selection == (0, 1)
    assert encoding.completion == 2
    assert encoding.system == (3, 4)
    assert encoding.ancilla == (0, 1, 2)


def test_fanout_layout_returns_ancillas_to_zero(coupled_h):
    encoding = block_encode(coupled_h, Basis.PAULI, fanout=True)
    # seleção (2) + flag + fan-out (2) + sistema (2)
    assert encoding.num_qubits == 7
    assert encoding.fanout == (2, 3, 4)
    assert encoding.system == (5, 6)

    u = circuit_unitary(encoding.circuit)
    fanout_mask = sum(1 << (encoding.num_qubits - 1 - q) for q in encoding.fanout)
    zero_fanout = [i for i in range(2 ** encoding.num_qubits) if i & fanout_mask == 0]
    leaked = u[:, zero_fanout]
    leaked = leaked[[i for i in range(leaked.shape[0]) if i & fanout_mask], :]
    assert np.allclose(leaked, 0.0)


@pytest.mark.parametrize("fixture", ["diagonal_a", "first_column_a", "lower_triangular_a"])
def test_non_hermitian_matrices(request, fixture):
    h = request.getfixturevalue(fixture)
    for basis in Basis:
        report = verify_block_encoding(block_encode(h, basis), h)
        assert report["max_block_error"] < 1e-10


def test_complex_random_matrix(random_complex):
    h = from_dense(random_complex(8, density=0.4))
    for basis in Basis:
        encoding = block_encode(h, basis)
        assert np.allclose(encoding.encoded_block(), h.to_dense() / encoding.normalization, atol=1e-10)


def test_merged_decomposition_reduces_lambda():
    h = from_dense(np.diag([1.0, 1.0, -2.0, -2.0]))
    merged = merge_identity_pairs(sigma_decompose(h))
    encoding = block_encode(h, Basis.SIGMA, decomposition=merged)

    assert len(merged) == 2
    assert encoding.normalization == pytest.approx(3.0)
    assert verify_block_encoding(encoding, h)["max_block_error"] < 1e-10


def test_single_term_without_selection():
    h = from_dense(np.array([[0.0, 0.0], [-2.0, 0.0]]))
    encoding = block_encode(h, Basis.SIGMA)
    assert encoding.selection == ()
    assert verify_block_encoding(encoding, h)["lambda"] == pytest.approx(2.0)


def test_single_pauli_term_has_no_ancilla():
    h = from_dense(np.array([[0.0, -1j], [1j, 0.0]])).scale(-0.5j)
    encoding = block_encode(h, Basis.PAULI)
    assert encoding.ancilla == ()
    assert verify_block_encoding(encoding, h)["max_block_error"] < 1e-10


def test_zero_matrix_is_rejected():
    with pytest.raises(EmptyDecompositionError):
        block_encode(SparseComplexMatrix.zeros(4, 4), Basis.PAULI)


def test_verification_failure_carries_report(coupled_h, diagonal_a):
    encoding = block_encode(coupled_h, Basis.PAULI)
    with pytest.raises(VerificationFailure) as exc_info:
        verify_block_encoding(encoding, diagonal_a)
    assert exc_info.value.exit_code == 2
    assert exc_info.value.report["max_block_error"] > 1e-10

    report = verify_block_encoding(encoding, diagonal_a, raise_on_failure=False)
    assert report["max_block_error"] > 1e-10


def test_controlled_sigma_branch_via_fanout():
    """Com o controle em |1⟩ e as ancilas em |0⟩, o ramo age como H_j"""
    s = SigmaString((S.PLUS, S.MP))
    circuit = build_select_fanout((P.X, P.I), 2, sigma=s)
    u = circuit_unitary(circuit)
    n_total = circuit.num_qubits

    # fixa o controle (qubit 0) em |1⟩ e projeta fan-out e completamento em |0⟩
    keep = [
        i for i in range(2 ** n_total)
        if (i >> (n_total - 1)) & 1 and not any((i >> (n_total - 1 - q)) & 1 for q in circuit.ancilla)
    ]
    assert np.allclose(u[np.ix_(keep, keep)], sigma_matrix(s))

    # controle em |0⟩: identidade
    block = extract_block(u, (0,) + circuit.ancilla, n_total)
    assert np.allclose(block, np.eye(4))


def test_uj_matches_controlled_branch_when_control_is_set():
    s = SigmaString((S.MINUS, S.I2))
    u = circuit_unitary(build_uj(s))
    assert np.allclose(extract_block(u, (0,), 3), sigma_matrix(s))


@pytest.mark.parametrize("m", range(1, 17))
def test_prep_is_unitary(m):
    rng = np.random.default_rng(m)
    coefficients = rng.normal(size=m) + 1j * rng.normal(size=m)
    prep = build_prep(coefficients).matrix

    assert np.max(np.abs(prep.conj().T @ prep - np.eye(prep.shape[0]))) < 1e-12
    magnitudes = np.abs(coefficients)
    assert np.allclose(prep[:m, 0], np.sqrt(magnitudes / magnitudes.sum()))


def test_diagonal_sigma_encoding(diagonal_a):
    """diag(2, 0, 0, 7) na base sigma: λ = 9 e bloco A/9"""
    encoding = block_encode(diagonal_a, Basis.SIGMA)

    assert encoding.normalization == pytest.approx(9.0)
    assert np.allclose(encoding.encoded_block(), np.diag([2.0, 0.0, 0.0, 7.0]) / 9.0, atol=1e-10)


def _random_sparse(rng, n: int) -> SparseComplexMatrix:
    dim = 2 ** n
    nnz = int(rng.integers(1, min(12, dim * dim) + 1))
    cells = rng.choice(dim * dim, size=nnz, replace=False)
    values = rng.normal(size=nnz) + 1j * rng.normal(size=nnz)
    return SparseComplexMatrix.from_entries(
        dim, dim, [(int(c) // dim, int(c) % dim, complex(v)) for c, v in zip(cells, values)]
    )


@pytest.mark.slow
def test_random_sparse_block_encodings():
    """100 matrizes esparsas aleatórias, n ≤ 3, nas duas bases"""
    rng = np.random.default_rng(2024)
    for _ in range(100):
        h = _random_sparse(rng, int(rng.integers(1, 4)))
        for basis in Basis:
            encoding = block_encode(h, basis)
            report = verify_block_encoding(encoding, h)
            assert report["max_block_error"] < 1e-10
            assert report["lambda"] == pytest.approx(encoding.decomposition.one_norm)
