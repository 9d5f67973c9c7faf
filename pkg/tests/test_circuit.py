import itertools

import numpy as np
import pytest

from app.core.exceptions import ValidationException
from app.services.circuit import (
    Control,
    GateCircuit,
    GateLabel,
    MultiControlledX,
    OpaqueUnitary,
    Polarity,
    SigmaString,
    SingleQubitGate,
    build_uj,
    build_uja,
    build_ujb,
    complement_matrix,
    completion_matrix,
    merge_cnx,
    orthogonal_complement,
    resource_summary,
    row_pattern_synthesis,
    row_patterns,
    sigma_matrix,
    unitary_completion,
)
from app.services.decompose import PauliSymbol as P, SigmaSymbol as S
from app.services.simverify import circuit_unitary, extract_block

NON_IDENTITY = (S.PLUS, S.MINUS, S.PM, S.MP)
ALL_SYMBOLS = NON_IDENTITY + (S.I2,)


def _all_strings(n: int, alphabet=ALL_SYMBOLS):
    return [SigmaString(symbols) for symbols in itertools.product(alphabet, repeat=n)]


def test_unitary_completion():
    s = SigmaString((S.PLUS, S.PM, S.MINUS, S.I2, S.MP))
    assert unitary_completion(s) == (P.X, P.I, P.X, P.I, P.I)


def test_single_factor_complement_swaps_symbols():
    """Para um fator, H̄ − H coincide com a troca PLUS<->MINUS, PM<->MP"""
    for sym in NON_IDENTITY:
        s = SigmaString((sym,))
        swapped = orthogonal_complement(s).symbols[0]
        assert np.array_equal(complement_matrix(s), sigma_matrix(SigmaString((swapped,))))


def test_complement_marks_identity_as_vanishing():
    assert orthogonal_complement(SigmaString((S.PM, S.I2))).vanishes
    assert not orthogonal_complement(SigmaString((S.PM, S.PLUS))).vanishes


@pytest.mark.parametrize("s", _all_strings(2))
def test_complement_is_orthogonal(s):
    """H_j + H_j' = H̄_j e H_j† H_j' = 0"""
    h, h_prime = sigma_matrix(s), complement_matrix(s)
    assert np.array_equal(h + h_prime, completion_matrix(s))
    assert np.allclose(h.conj().T @ h_prime, 0.0)


def test_build_ujb_and_uja_structure():
    s = SigmaString((S.PLUS, S.MP, S.I2))
    ujb = build_ujb(s)
    uja = build_uja(s)

    assert ujb.gates == (SingleQubitGate(0, GateLabel.X), SingleQubitGate(1, GateLabel.X))
    assert uja.gates == (
        MultiControlledX(0, (Control(1, Polarity.OPEN), Control(2, Polarity.CLOSED))),
    )
    assert build_uj(s).gates == ujb.gates + uja.gates
    assert build_uj(s).ancilla == (0,)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_uj_block_reproduces_sigma_string(n):
    """Com a ancila em |0⟩, U_j age como H_j em todas as strings de n ≤ 3"""
    for s in _all_strings(n):
        circuit = build_uj(s)
        u = circuit_unitary(circuit)
        assert np.allclose(u.conj().T @ u, np.eye(2 ** (n + 1)))
        block = extract_block(u, circuit.ancilla, circuit.num_qubits)
        assert np.allclose(block, sigma_matrix(s), atol=1e-12)


def test_row_patterns():
    assert row_patterns(SigmaString((S.PLUS, S.MP))) == ["01"]
    assert row_patterns(SigmaString((S.I2, S.MINUS))) == ["01", "11"]


def test_row_pattern_synthesis_merges_to_uja():
    """Os C^nX por padrão fundidos recuperam o C^kX de U_{j,a}"""
    for s in _all_strings(3):
        patterns = row_patterns(s)
        merged = merge_cnx(row_pattern_synthesis(patterns, len(s)))
        assert merged.gates == build_uja(s).gates


def test_row_pattern_synthesis_rejects_bad_patterns():
    with pytest.raises(ValidationException):
        row_pattern_synthesis(["01", "01"], 2)
    with pytest.raises(ValidationException) as exc_info:
        row_pattern_synthesis(["0", "012"], 3)
    assert "patterns[0]" in exc_info.value.field_errors


def test_merge_cnx_cancels_identical_pair():
    gate = MultiControlledX(0, (Control(1, Polarity.OPEN),))
    circuit = GateCircuit(2, (gate, gate))
    assert merge_cnx(circuit).gates == ()


def test_merge_cnx_backtracks_after_merge():
    """Fusão no meio cria um novo par com a porta anterior"""
    a = MultiControlledX(0, (Control(1, Polarity.OPEN),))
    b = MultiControlledX(0, (Control(1, Polarity.OPEN), Control(2, Polarity.OPEN)))
    c = MultiControlledX(0, (Control(1, Polarity.OPEN), Control(2, Polarity.CLOSED)))
    merged = merge_cnx(GateCircuit(3, (a, b, c)))
    assert merged.gates == ()


def test_merge_cnx_preserves_unitary():
    rng = np.random.default_rng(3)
    gates = []
    for _ in range(12):
        controls = tuple(
            Control(q, Polarity.OPEN if rng.random() < 0.5 else Polarity.CLOSED) for q in (1, 2, 3) if rng.random() < 0.7
        )
        gates.append(MultiControlledX(0, controls))
    circuit = GateCircuit(4, tuple(gates))
    merged = merge_cnx(circuit)

    assert len(merged) <= len(circuit)
    assert np.allclose(circuit_unitary(merged), circuit_unitary(circuit))


def test_merge_cnx_ignores_different_targets():
    a = MultiControlledX(0, (Control(2),))
    b = MultiControlledX(1, (Control(2),))
    assert merge_cnx(GateCircuit(3, (a, b))).gates == (a, b)


def test_gate_validation():
    with pytest.raises(ValidationException):
        MultiControlledX(0, (Control(0),))
    with pytest.raises(ValidationException):
        SingleQubitGate(1, GateLabel.Z, controls=(Control(0), Control(0)))
    with pytest.raises(ValidationException) as exc_info:
        GateCircuit(2, (SingleQubitGate(2, GateLabel.X),))
    assert "gates[0]" in exc_info.value.field_errors


def test_opaque_unitary_must_be_unitary():
    with pytest.raises(ValidationException):
        OpaqueUnitary((0,), np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_remap_and_controlled():
    circuit = GateCircuit(2, (SingleQubitGate(0, GateLabel.X), SingleQubitGate(1, GateLabel.Z)))
    moved = circuit.remap({0: 2, 1: 3}, 4).controlled((Control(0, Polarity.OPEN),))

    assert moved.gates[0] == SingleQubitGate(2, GateLabel.X, controls=(Control(0, Polarity.OPEN),))
    assert moved.gates[1].target == 3


def test_resource_summary():
    summary = resource_summary(build_uj(SigmaString((S.PLUS, S.MINUS, S.I2))))
    assert summary["qubits"] == 4
    assert summary["ancilla"] == 1
    assert summary["gate_count"] == 4
    assert summary["by_kind"] == {"mcx": 1, "x": 3}
    assert summary["mcx_controls"] == {"2": 1}


# ----- circuitos dos exemplos trabalhados -----

def test_uj_for_three_qubit_example():
    """(MINUS, PM, I2): X na ancila, X em q1 e um C²X fechado em q1, aberto em q2"""
    circuit = build_uj(SigmaString((S.MINUS, S.PM, S.I2)))
    assert circuit.gates == (
        SingleQubitGate(0, GateLabel.X),
        SingleQubitGate(1, GateLabel.X),
        MultiControlledX(0, (Control(1, Polarity.CLOSED), Control(2, Polarity.OPEN))),
    )


def test_uj_for_five_qubit_example():
    circuit = build_uj(SigmaString((S.PLUS, S.PM, S.I2, S.MINUS, S.PLUS)))
    assert circuit.gates == (
        SingleQubitGate(0, GateLabel.X),
        SingleQubitGate(1, GateLabel.X),
        SingleQubitGate(4, GateLabel.X),
        SingleQubitGate(5, GateLabel.X),
        MultiControlledX(0, (
            Control(1, Polarity.OPEN),
            Control(2, Polarity.OPEN),
            Control(4, Polarity.CLOSED),
            Control(5, Polarity.OPEN),
        )),
    )


@pytest.mark.parametrize("s", [s for n in (1, 2, 3) for s in _all_strings(n)],
                         ids=lambda s: ",".join(sym.value for sym in s))
def test_completion_pair_is_complete(s):
    """H'H'ᵀ + HHᵀ = I, inclusive com fatores I2"""
    h, h_prime = sigma_matrix(s), complement_matrix(s)
    assert np.array_equal(h_prime @ h_prime.T + h @ h.T, np.eye(2 ** len(s)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_uj_action_on_ancilla_zero(n):
    """U_j(|0⟩|χ⟩) = |0⟩H_j|χ⟩ + |1⟩(H̄_j − H_j)|χ⟩ para 20 estados por string"""
    rng = np.random.default_rng(n)
    dim = 2 ** n
    for s in _all_strings(n):
        chis = rng.normal(size=(dim, 20)) + 1j * rng.normal(size=(dim, 20))
        chis /= np.linalg.norm(chis, axis=0)
        out = circuit_unitary(build_uj(s)) @ np.vstack([chis, np.zeros((dim, 20))])

        assert np.allclose(out[:dim], sigma_matrix(s) @ chis, rtol=0.0, atol=1e-10)
        assert np.allclose(out[dim:], complement_matrix(s) @ chis, rtol=0.0, atol=1e-10)


@pytest.mark.parametrize("patterns, controls", [
    (["100", "101"], (Control(1, Polarity.CLOSED), Control(2, Polarity.OPEN))),
    (["0100", "0101"], (Control(1, Polarity.OPEN), Control(2, Polarity.CLOSED), Control(3, Polarity.OPEN))),
])
def test_merge_of_adjacent_row_patterns(patterns, controls):
    """Dois padrões que diferem só no último bit viram um único C^{n-1}X com a mesma unitária"""
    unmerged = row_pattern_synthesis(patterns, len(patterns[0]))
    merged = merge_cnx(unmerged)

    assert merged.gates == (MultiControlledX(0, controls),)
    assert np.allclose(circuit_unitary(merged), circuit_unitary(unmerged), rtol=0.0, atol=1e-12)


def test_row_pattern_merge_up_to_four_qubits():
    for n in (1, 2, 3, 4):
        for s in _all_strings(n):
            merged = merge_cnx(row_pattern_synthesis(row_patterns(s), n))
            assert merged.gates == build_uja(s).gates
