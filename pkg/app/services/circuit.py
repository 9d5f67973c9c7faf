"""
Representação intermediária de circuitos e síntese de U_j para termos Sigma.

A lista de portas está em ordem de aplicação: a primeira porta age primeiro,
e a matriz do circuito é o produto das portas em ordem inversa.
O qubit 0 é o mais significativo.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.exceptions import DimensionMismatchError, ValidationException
from app.core.logging import get_logger
from app.services.decompose import PauliSymbol, SigmaSymbol, SYMBOL_MATRICES

logger = get_logger(__name__)


class Polarity(str, Enum):
    OPEN = "open"      # controle em |0⟩
    CLOSED = "closed"  # controle em |1⟩

    def flipped(self) -> "Polarity":
        return Polarity.CLOSED if self is Polarity.OPEN else Polarity.OPEN


class GateLabel(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    RX = "RX"
    RY = "RY"


@dataclass(frozen=True, order=True)
class Control:
    qubit: int
    polarity: Polarity = Polarity.CLOSED


def _check_controls(controls: Sequence[Control], targets: Sequence[int]) -> Tuple[Control, ...]:
    qubits = [c.qubit for c in controls]
    if len(set(qubits)) != len(qubits):
        raise ValidationException("Qubits de controle repetidos", field_errors={"controls": [str(qubits)]})
    clash = set(qubits) & set(targets)
    if clash:
        raise ValidationException(
            "Controle coincide com o alvo", field_errors={"controls": [str(sorted(clash))]}
        )
    return tuple(sorted(controls, key=lambda c: c.qubit))


@dataclass(frozen=True)
class SingleQubitGate:
    """Porta de um qubit, opcionalmente controlada (ex.: CZ, CNOT, RY controlado)."""

    target: int
    label: GateLabel
    theta: float = 0.0
    controls: Tuple[Control, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "controls", _check_controls(self.controls, [self.target]))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + (self.target,)

    def matrix(self) -> npt.NDArray[np.complex128]:
        return gate_matrix(self.label, self.theta)


@dataclass(frozen=True)
class MultiControlledX:
    """C^kX com polaridade por controle; controles ordenados por qubit."""

    target: int
    controls: Tuple[Control, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "controls", _check_controls(self.controls, [self.target]))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + (self.target,)

    def control_map(self) -> Dict[int, Polarity]:
        return {c.qubit: c.polarity for c in self.controls}


@dataclass(frozen=True, eq=False)
class OpaqueUnitary:
    """Unitária densa aplicada a um subconjunto de qubits (primeiro qubit = mais significativo)."""

    qubit_list: Tuple[int, ...]
    matrix: npt.NDArray[np.complex128]
    label: str = ""

    def __post_init__(self) -> None:
        qubits = tuple(int(q) for q in self.qubit_list)
        if len(set(qubits)) != len(qubits):
            raise ValidationException("Qubits repetidos", field_errors={"qubits": [str(qubits)]})
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        dim = 2 ** len(qubits)
        if matrix.shape != (dim, dim):
            raise DimensionMismatchError(
                "Matriz opaca incompatível com os qubits", shape=matrix.shape, qubits=len(qubits)
            )
        error = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))) if dim else 0.0
        if error > settings.UNITARY_TOL:
            raise ValidationException(
                "Matriz opaca não é unitária", field_errors={"matrix": [f"‖U†U − I‖ = {error:.3e}"]}
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "qubit_list", qubits)
        object.__setattr__(self, "matrix", matrix)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.qubit_list

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OpaqueUnitary):
            return NotImplemented
        return self.qubit_list == other.qubit_list and np.array_equal(self.matrix, other.matrix)

    __hash__ = None  # type: ignore[assignment]


Gate = Union[SingleQubitGate, MultiControlledX, OpaqueUnitary]


@dataclass(frozen=True)
class GateCircuit:
    """
    Circuito sobre um registro explícito de qubits.

    Attributes:
        num_qubits: Total de qubits (ancilas incluídas)
        gates: Portas em ordem de aplicação
        ancilla: Índices dos qubits ancila; os demais são de sistema
    """

    num_qubits: int
    gates: Tuple[Gate, ...] = ()
    ancilla: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancilla", tuple(sorted(self.ancilla)))
        if self.num_qubits < 0:
            raise ValidationException("num_qubits negativo", field_errors={"qubits": [str(self.num_qubits)]})
        for q in self.ancilla:
            if not 0 <= q < self.num_qubits:
                raise ValidationException("Ancila fora do registro", field_errors={"ancilla": [str(q)]})
        for idx, gate in enumerate(self.gates):
            bad = [q for q in gate.qubits if not 0 <= q < self.num_qubits]
            if bad:
                raise ValidationException(
                    "Porta com qubit fora do registro",
                    field_errors={f"gates[{idx}]": [f"qubits {bad} fora de 0..{self.num_qubits - 1}"]},
                )

    @property
    def system(self) -> Tuple[int, ...]:
        anc = set(self.ancilla)
        return tuple(q for q in range(self.num_qubits) if q not in anc)

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: "GateCircuit") -> "GateCircuit":
        """Concatena `other` depois deste circuito."""
        if other.num_qubits != self.num_qubits:
            raise DimensionMismatchError(
                "Circuitos com registros diferentes", left=self.num_qubits, right=other.num_qubits
            )
        return GateCircuit(
            self.num_qubits, self.gates + other.gates, tuple(set(self.ancilla) | set(other.ancilla))
        )

    def remap(
        self, mapping: Mapping[int, int], num_qubits: int, ancilla: Iterable[int] = ()
    ) -> "GateCircuit":
        """Reindexa os qubits e embute o circuito num registro maior."""
        return GateCircuit(num_qubits, tuple(_remap_gate(g, mapping) for g in self.gates), tuple(ancilla))

    def controlled(self, controls: Sequence[Control]) -> "GateCircuit":
        """Acrescenta `controls` a todas as portas."""
        return GateCircuit(
            self.num_qubits, tuple(_add_controls(g, controls) for g in self.gates), self.ancilla
        )


def _remap_gate(gate: Gate, mapping: Mapping[int, int]) -> Gate:
    if isinstance(gate, OpaqueUnitary):
        return OpaqueUnitary(tuple(mapping[q] for q in gate.qubits), gate.matrix, gate.label)
    controls = tuple(Control(mapping[c.qubit], c.polarity) for c in gate.controls)
    return replace(gate, target=mapping[gate.target], controls=controls)


def _add_controls(gate: Gate, controls: Sequence[Control]) -> Gate:
    if isinstance(gate, OpaqueUnitary):
        raise ValidationException(
            "Controle de unitária opaca não suportado", field_errors={"gate": [gate.label or "opaque"]}
        )
    return replace(gate, controls=tuple(gate.controls) + tuple(controls))


def gate_matrix(label: GateLabel, theta: float = 0.0) -> npt.NDArray[np.complex128]:
    """Matriz 2x2 de uma porta de um qubit."""
    if label is GateLabel.RX:
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if label is GateLabel.RY:
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if label is GateLabel.H:
        return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    return SYMBOL_MATRICES[PauliSymbol(label.value)]


# ----- strings Sigma e completamento unitário -----

@dataclass(frozen=True)
class SigmaString:
    symbols: Tuple[SigmaSymbol, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(SigmaSymbol(s) for s in self.symbols))
        if not self.symbols:
            raise ValidationException("SigmaString vazia", field_errors={"symbols": ["comprimento 0"]})

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class ComplementString:
    """Complemento posição a posição; `None` marca o fator nulo de I2."""

    symbols: Tuple[Optional[SigmaSymbol], ...]

    @property
    def vanishes(self) -> bool:
        return any(s is None for s in self.symbols)


_SWAP = {
    SigmaSymbol.PLUS: SigmaSymbol.MINUS,
    SigmaSymbol.MINUS: SigmaSymbol.PLUS,
    SigmaSymbol.PM: SigmaSymbol.MP,
    SigmaSymbol.MP: SigmaSymbol.PM,
}

# polaridade do controle de U_{j,a}: bit da linha de H_j
_POLARITY = {
    SigmaSymbol.PLUS: Polarity.OPEN,
    SigmaSymbol.PM: Polarity.OPEN,
    SigmaSymbol.MINUS: Polarity.CLOSED,
    SigmaSymbol.MP: Polarity.CLOSED,
}


def unitary_completion(s: SigmaString) -> Tuple[PauliSymbol, ...]:
    """PLUS/MINUS -> X; PM/MP/I2 -> I."""
    return tuple(
        PauliSymbol.X if sym in (SigmaSymbol.PLUS, SigmaSymbol.MINUS) else PauliSymbol.I for sym in s
    )


def orthogonal_complement(s: SigmaString) -> ComplementString:
    """Troca PLUS<->MINUS e PM<->MP; I2 vira o marcador nulo."""
    return ComplementString(tuple(_SWAP.get(sym) for sym in s))


def _kron_dense(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def sigma_matrix(s: SigmaString) -> npt.NDArray[np.complex128]:
    """Matriz densa de H_j."""
    return _kron_dense([SYMBOL_MATRICES[sym] for sym in s])


def completion_matrix(s: SigmaString) -> npt.NDArray[np.complex128]:
    """Matriz densa de H̄_j."""
    return _kron_dense([SYMBOL_MATRICES[sym] for sym in unitary_completion(s)])


def complement_matrix(s: SigmaString) -> npt.NDArray[np.complex128]:
    """H_j' = H̄_j − H_j; para um único fator coincide com o complemento por troca."""
    return completion_matrix(s) - sigma_matrix(s)


def build_ujb(s: SigmaString) -> GateCircuit:
    """X na ancila (qubit 0) seguido de H̄_j nos qubits de sistema 1..n."""
    gates: List[Gate] = [SingleQubitGate(0, GateLabel.X)]
    for q, sym in enumerate(unitary_completion(s), start=1):
        if sym is PauliSymbol.X:
            gates.append(SingleQubitGate(q, GateLabel.X))
    return GateCircuit(len(s) + 1, tuple(gates), ancilla=(0,))


def build_uja(s: SigmaString) -> GateCircuit:
    """
    Um único C^kX na ancila: controle aberto para PLUS/PM, fechado para
    MINUS/MP e nenhum controle nas posições I2.
    """
    controls = tuple(
        Control(q, _POLARITY[sym]) for q, sym in enumerate(s, start=1) if sym is not SigmaSymbol.I2
    )
    return GateCircuit(len(s) + 1, (MultiControlledX(0, controls),), ancilla=(0,))


def build_uj(s: SigmaString) -> GateCircuit:
    """U_j = U_{j,a} U_{j,b}: portas de U_{j,b} primeiro."""
    return build_ujb(s).then(build_uja(s))


def row_patterns(s: SigmaString) -> List[str]:
    """Padrões de bits das linhas não nulas de H_j H_jᵀ, em ordem crescente."""
    patterns = [""]
    for sym in s:
        if sym is SigmaSymbol.I2:
            bits = "01"
        else:
            bits = "0" if _POLARITY[sym] is Polarity.OPEN else "1"
        patterns = [p + b for p in patterns for b in bits]
    return patterns


def row_pattern_synthesis(patterns: Sequence[str], n: int) -> GateCircuit:
    """
    Um C^nX por padrão: controle fechado onde o bit é 1, aberto onde é 0.

    A ancila é o qubit 0; o bit i do padrão controla o qubit i+1.
    """
    if len(set(patterns)) != len(patterns):
        raise ValidationException("Padrões repetidos", field_errors={"patterns": list(patterns)})
    gates = []
    for idx, pattern in enumerate(patterns):
        if len(pattern) != n or set(pattern) - {"0", "1"}:
            raise ValidationException(
                f"Padrão deve ter {n} bits", field_errors={f"patterns[{idx}]": [pattern]}
            )
        controls = tuple(
            Control(q, Polarity.CLOSED if bit == "1" else Polarity.OPEN)
            for q, bit in enumerate(pattern, start=1)
        )
        gates.append(MultiControlledX(0, controls))
    return GateCircuit(n + 1, tuple(gates), ancilla=(0,))


def _merge_pair(a: MultiControlledX, b: MultiControlledX) -> Optional[Tuple[Gate, ...]]:
    """Resultado da fusão de um par adjacente, ou None se a regra não se aplica."""
    if a.target != b.target:
        return None
    ca, cb = a.control_map(), b.control_map()
    if ca.keys() != cb.keys():
        return None
    differing = [q for q in ca if ca[q] != cb[q]]
    if not differing:
        return ()
    if len(differing) == 1:
        q = differing[0]
        return (MultiControlledX(a.target, tuple(c for c in a.controls if c.qubit != q)),)
    return None


def merge_cnx(c: GateCircuit) -> GateCircuit:
    """
    Otimização peephole de C^nX adjacentes com o mesmo alvo.

    Pares cujos controles diferem só na polaridade de um qubit viram um
    C^{n-1}X sem esse controle; pares idênticos se cancelam. Repete até
    o ponto fixo.
    """
    gates = list(c.gates)
    merged = 0
    i = 0
    while i < len(gates) - 1:
        a, b = gates[i], gates[i + 1]
        result = None
        if isinstance(a, MultiControlledX) and isinstance(b, MultiControlledX):
            result = _merge_pair(a, b)
        if result is None:
            i += 1
            continue
        gates[i:i + 2] = list(result)
        merged += 1
        i = max(i - 1, 0)

    if merged:
        logger.debug("Portas C^nX fundidas", merges=merged, gates=len(gates))
    return GateCircuit(c.num_qubits, tuple(gates), c.ancilla)


def resource_summary(c: GateCircuit) -> Dict[str, object]:
    """Contagem de portas por tipo e histograma de controles dos C^kX."""
    kinds: Counter = Counter()
    controls: Counter = Counter()
    for gate in c.gates:
        if isinstance(gate, MultiControlledX):
            kinds["mcx"] += 1
            controls[len(gate.controls)] += 1
        elif isinstance(gate, OpaqueUnitary):
            kinds["opaque"] += 1
        else:
            kinds[gate.label.value.lower() if not gate.controls else f"c{gate.label.value.lower()}"] += 1
    return {
        "qubits": c.num_qubits,
        "ancilla": len(c.ancilla),
        "gate_count": len(c.gates),
        "by_kind": dict(sorted(kinds.items())),
        "mcx_controls": {str(k): v for k, v in sorted(controls.items())},
    }
