"""
Block encoding PREP → SELECT → PREP† a partir de uma decomposição em termos.

Layout dos qubits (qubit 0 = mais significativo):
    seleção (k) | [flag + fan-out (n)] | [ancila de completamento] | sistema (n)

Magnitudes dos coeficientes ficam em PREP; fases ficam em SELECT, como
uma unitária diagonal sobre o registro de seleção. O bloco codificado é H/λ.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.exceptions import EmptyDecompositionError, ValidationException, VerificationFailure
from app.core.logging import get_logger
from app.services.circuit import (
    Control,
    Gate,
    GateCircuit,
    GateLabel,
    MultiControlledX,
    OpaqueUnitary,
    Polarity,
    SigmaString,
    SingleQubitGate,
    build_uj,
    build_uja,
    resource_summary,
    unitary_completion,
)
from app.services.decompose import (
    Basis,
    PauliSymbol,
    TermDecomposition,
    get_strategy,
)
from app.services.simverify import circuit_unitary, extract_block, max_abs_error
from app.services.tensorcore import SparseComplexMatrix, next_power_of_two, num_qubits_for

logger = get_logger(__name__)


@dataclass(frozen=True)
class BlockEncoding:
    """
    Circuito de block encoding e a especificação dos registros.

    Attributes:
        circuit: PREP, SELECT e PREP† em ordem de aplicação
        normalization: λ = Σ_j |α_j|
        basis: Base da decomposição de origem
        selection: Qubits do registro de seleção
        completion: Ancila de completamento compartilhada (base sigma)
        fanout: Flag seguida das ancilas de fan-out (quando usadas)
        system: Qubits de sistema
    """

    circuit: GateCircuit
    normalization: float
    basis: Basis
    decomposition: TermDecomposition = field(compare=False)
    selection: Tuple[int, ...] = ()
    completion: Optional[int] = None
    fanout: Tuple[int, ...] = ()
    system: Tuple[int, ...] = ()

    @property
    def num_qubits(self) -> int:
        return self.circuit.num_qubits

    @property
    def ancilla(self) -> Tuple[int, ...]:
        extra = () if self.completion is None else (self.completion,)
        return tuple(sorted(self.selection + extra + self.fanout))

    def encoded_block(self) -> npt.NDArray[np.complex128]:
        """Bloco com todas as ancilas em |0⟩ (a unitária inteira se não houver ancilas)."""
        u = circuit_unitary(self.circuit)
        if not self.ancilla:
            return u
        return extract_block(u, self.ancilla, self.num_qubits)


# ----- PREP -----

def build_prep(coefficients: Sequence[complex]) -> OpaqueUnitary:
    """
    Unitária real cuja primeira coluna é (√(|α_i|/λ))_i, completada com zeros
    até a próxima potência de dois.

    As demais colunas vêm de uma reflexão de Householder que leva e_0 ao
    vetor alvo.
    """
    magnitudes = np.abs(np.asarray(coefficients, dtype=np.complex128))
    if magnitudes.size == 0 or not np.any(magnitudes >= settings.ZERO_TOL):
        raise EmptyDecompositionError("PREP exige ao menos um coeficiente não nulo")

    dim = next_power_of_two(magnitudes.size)
    target = np.zeros(dim)
    target[: magnitudes.size] = np.sqrt(magnitudes / magnitudes.sum())

    w = -target.copy()
    w[0] += 1.0
    norm = np.dot(w, w)
    if norm < settings.ZERO_TOL:
        matrix = np.eye(dim)
    else:
        matrix = np.eye(dim) - 2.0 * np.outer(w, w) / norm
    k = num_qubits_for(dim)
    return OpaqueUnitary(tuple(range(k)), matrix.astype(np.complex128), label="PREP")


def _dagger(u: OpaqueUnitary, label: str) -> OpaqueUnitary:
    return OpaqueUnitary(u.qubits, u.matrix.conj().T, label=label)


# ----- SELECT -----

def _pattern_controls(index: int, selection: Sequence[int]) -> Tuple[Control, ...]:
    k = len(selection)
    return tuple(
        Control(q, Polarity.CLOSED if (index >> (k - 1 - pos)) & 1 else Polarity.OPEN)
        for pos, q in enumerate(selection)
    )


def _phase_gate(phases: Sequence[complex], selection: Sequence[int]) -> Optional[OpaqueUnitary]:
    dim = 2 ** len(selection)
    diagonal = np.ones(dim, dtype=np.complex128)
    diagonal[: len(phases)] = phases
    if np.allclose(diagonal, 1.0, atol=settings.ZERO_TOL):
        return None
    return OpaqueUnitary(tuple(selection), np.diag(diagonal), label="PHASE")


def pauli_branch(symbols: Sequence[PauliSymbol]) -> GateCircuit:
    """Circuito de uma string de Pauli sobre n qubits (identidades omitidas)."""
    gates = tuple(
        SingleQubitGate(q, GateLabel(sym.value)) for q, sym in enumerate(symbols) if sym is not PauliSymbol.I
    )
    return GateCircuit(len(symbols), gates)


def build_select(
    branches: Sequence[GateCircuit],
    phases: Optional[Sequence[complex]] = None,
) -> GateCircuit:
    """
    SELECT = Σ_i |i⟩⟨i| ⊗ e^{iθ_i} B_i.

    Args:
        branches: Circuitos de cada ramo, todos sobre o mesmo registro alvo
        phases: Fase unitária de cada ramo (padrão 1)

    Returns:
        Circuito sobre k = ⌈log2 m⌉ qubits de seleção seguidos do registro
        alvo. Ramos de preenchimento agem como identidade.
    """
    if not branches:
        raise EmptyDecompositionError("SELECT sem ramos")
    width = branches[0].num_qubits
    if any(b.num_qubits != width for b in branches):
        raise ValidationException(
            "Ramos de SELECT com registros diferentes",
            field_errors={"branches": [str([b.num_qubits for b in branches])]},
        )
    m = len(branches)
    k = num_qubits_for(next_power_of_two(m))
    selection = tuple(range(k))
    total = k + width
    mapping = {q: k + q for q in range(width)}

    gates: List[Gate] = []
    ancilla = set(selection)
    for index, branch in enumerate(branches):
        placed = branch.remap(mapping, total)
        ancilla.update(mapping[q] for q in branch.ancilla)
        if k:
            placed = placed.controlled(_pattern_controls(index, selection))
        gates.extend(placed.gates)

    phase = _phase_gate(list(phases or [1.0] * m), selection)
    if phase is not None:
        gates.append(phase)
    return GateCircuit(total, tuple(gates), tuple(ancilla))


def fanout_layout(n: int, with_completion: bool = False) -> Dict[str, Union[int, Tuple[int, ...]]]:
    """
    Layout do circuito de fan-out:
    controle (0), ancilas de fan-out (1..n), [completamento (n+1)], alvos.
    """
    offset = n + 1 + (1 if with_completion else 0)
    layout: Dict[str, Union[int, Tuple[int, ...]]] = {
        "control": 0,
        "fanout": tuple(range(1, n + 1)),
        "system": tuple(range(offset, offset + n)),
    }
    if with_completion:
        layout["completion"] = n + 1
    return layout


def build_select_fanout(
    term: Sequence[PauliSymbol],
    n: int,
    sigma: Optional[SigmaString] = None,
) -> GateCircuit:
    """
    Controlado-(⊗ term) via fan-out: CNOTs do controle para uma ancila por
    qubit, portas de um qubit controladas por essas ancilas e fan-in.

    Com `sigma`, monta o controlado-U_j: X controlado na ancila de
    completamento, H̄_j pelas ancilas de fan-out e o C^kX de U_{j,a} com o
    controle extra. As ancilas de fan-out voltam a |0⟩.
    """
    term = tuple(PauliSymbol(s) for s in term)
    if len(term) != n:
        raise ValidationException(
            "Termo com comprimento diferente de n", field_errors={"term": [f"{len(term)} != {n}"]}
        )
    if sigma is not None and len(sigma) != n:
        raise ValidationException(
            "SigmaString com comprimento diferente de n", field_errors={"sigma": [f"{len(sigma)} != {n}"]}
        )
    layout = fanout_layout(n, with_completion=sigma is not None)
    control = layout["control"]
    fanout = layout["fanout"]
    system = layout["system"]
    total = 1 + 2 * n + (1 if sigma is not None else 0)

    fan = [MultiControlledX(a, (Control(control),)) for a in fanout]
    gates: List[Gate] = list(fan)
    if sigma is not None:
        gates.append(MultiControlledX(layout["completion"], (Control(control),)))
    for a, q, sym in zip(fanout, system, term):
        if sym is not PauliSymbol.I:
            gates.append(SingleQubitGate(q, GateLabel(sym.value), controls=(Control(a),)))
    if sigma is not None:
        uja = build_uja_controls(sigma, system)
        gates.append(MultiControlledX(layout["completion"], (Control(control),) + uja))
    gates.extend(reversed(fan))

    ancilla = tuple(fanout) + ((layout["completion"],) if sigma is not None else ())
    return GateCircuit(total, tuple(gates), ancilla)


def build_uja_controls(sigma: SigmaString, system: Sequence[int]) -> Tuple[Control, ...]:
    """Controles de U_{j,a} reindexados para os qubits `system`."""
    gate = build_uja(sigma).gates[0]
    mapping = {q + 1: system[q] for q in range(len(system))}
    return tuple(Control(mapping[c.qubit], c.polarity) for c in gate.controls)


# ----- block encoding completo -----

def _branches(d: TermDecomposition) -> List[GateCircuit]:
    if d.basis == Basis.PAULI:
        return [pauli_branch(t.symbols) for t in d.terms]
    return [build_uj(SigmaString(t.symbols)) for t in d.terms]


def _phases(d: TermDecomposition) -> List[complex]:
    return [c / abs(c) for c in d.coefficients]


def _fanout_select(d: TermDecomposition, k: int) -> Tuple[GateCircuit, Tuple[int, ...], Optional[int], Tuple[int, ...]]:
    n = d.n
    sigma = d.basis == Basis.SIGMA
    selection = tuple(range(k))
    flag = k
    layout = fanout_layout(n, with_completion=sigma)
    total = k + 1 + n + (1 if sigma else 0) + n
    mapping = {q: k + q for q in range(1 + 2 * n + (1 if sigma else 0))}

    gates: List[Gate] = []
    for index, term in enumerate(d.terms):
        flip = MultiControlledX(flag, _pattern_controls(index, selection))
        if sigma:
            s = SigmaString(term.symbols)
            branch = build_select_fanout(unitary_completion(s), n, sigma=s)
        else:
            branch = build_select_fanout(term.symbols, n)
        gates.append(flip)
        gates.extend(branch.remap(mapping, total).gates)
        gates.append(flip)

    phase = _phase_gate(_phases(d), selection)
    if phase is not None:
        gates.append(phase)

    fanout = (flag,) + tuple(mapping[a] for a in layout["fanout"])
    completion = mapping[layout["completion"]] if sigma else None
    system = tuple(mapping[q] for q in layout["system"])
    circuit = GateCircuit(total, tuple(gates), selection + fanout + ((completion,) if sigma else ()))
    return circuit, fanout, completion, system


def block_encode(
    h: SparseComplexMatrix,
    basis: Union[Basis, str] = Basis.PAULI,
    fanout: bool = False,
    decomposition: Optional[TermDecomposition] = None,
) -> BlockEncoding:
    """
    Monta PREP → SELECT → PREP† para h.

    Args:
        h: Matriz 2^n x 2^n não nula
        basis: Base da decomposição (pauli ou sigma)
        fanout: Usa o SELECT com fan-out (flag + uma ancila por qubit)
        decomposition: Decomposição já calculada (ex.: após fusão de pares)

    Returns:
        BlockEncoding cujo bloco de ancilas |0⟩ é h/λ
    """
    basis = Basis(basis)
    d = decomposition or get_strategy(basis).decompose(h)
    if not d.terms:
        raise EmptyDecompositionError("Matriz nula não admite block encoding")

    with logger.timing("block_encode"):
        m = len(d.terms)
        k = num_qubits_for(next_power_of_two(m))
        selection = tuple(range(k))
        prep = build_prep(d.coefficients)

        if fanout:
            select, fan, completion, system = _fanout_select(d, k)
        else:
            select = build_select(_branches(d), _phases(d))
            fan = ()
            completion = k if basis == Basis.SIGMA else None
            start = k + (1 if completion is not None else 0)
            system = tuple(range(start, start + d.n))

        gates: List[Gate] = []
        if k:
            gates.append(prep)
        gates.extend(select.gates)
        if k:
            gates.append(_dagger(prep, "PREP†"))
        circuit = GateCircuit(select.num_qubits, tuple(gates), select.ancilla)

    encoding = BlockEncoding(
        circuit=circuit,
        normalization=d.one_norm,
        basis=basis,
        decomposition=d,
        selection=selection,
        completion=completion,
        fanout=fan,
        system=system,
    )
    logger.info(
        "Block encoding montado",
        basis=basis.value,
        terms=m,
        qubits=circuit.num_qubits,
        gates=len(circuit),
        normalization=encoding.normalization,
    )
    return encoding


def verify_block_encoding(
    encoding: BlockEncoding,
    h: SparseComplexMatrix,
    tol: float = 1e-10,
    raise_on_failure: bool = True,
) -> Dict[str, object]:
    """
    Compara o bloco extraído com h/λ.

    Returns:
        Relatório com lambda, max_block_error, qubits e gate_count

    Raises:
        VerificationFailure: se o erro passar de `tol` e `raise_on_failure`
    """
    block = encoding.encoded_block()
    expected = h.to_dense() / encoding.normalization
    report: Dict[str, object] = {
        "lambda": encoding.normalization,
        "max_block_error": max_abs_error(block, expected),
        "qubits": encoding.num_qubits,
        "gate_count": len(encoding.circuit),
        "resources": resource_summary(encoding.circuit),
    }
    if raise_on_failure and report["max_block_error"] > tol:
        raise VerificationFailure("Bloco codificado difere de H/λ", report=report)
    return report
