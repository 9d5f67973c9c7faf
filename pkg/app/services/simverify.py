"""
Simulação exata de `GateCircuit` por vetor de estado.

O estado é um tensor numpy de forma (2,)*n (+ um eixo de lote), com o
qubit q no eixo q. Portas controladas agem por fatiamento: só as fatias
que satisfazem os controles são atualizadas, sem materializar matrizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.exceptions import DenseCapExceededError, DimensionMismatchError, ValidationException
from app.core.logging import get_logger
from app.services.circuit import (
    Gate,
    GateCircuit,
    GateLabel,
    MultiControlledX,
    OpaqueUnitary,
    Polarity,
    gate_matrix,
)

logger = get_logger(__name__)

_X = gate_matrix(GateLabel.X)


@dataclass(frozen=True)
class Statevector:
    num_qubits: int
    amplitudes: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != 2 ** self.num_qubits:
            raise DimensionMismatchError(
                "Vetor de estado com tamanho incompatível", qubits=self.num_qubits, size=amps.size
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "Statevector":
        amps = np.zeros(2 ** num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _control_index(gate: Gate, n: int) -> List[object]:
    idx: List[object] = [slice(None)] * (n + 1)
    for c in getattr(gate, "controls", ()):
        idx[c.qubit] = 1 if c.polarity is Polarity.CLOSED else 0
    return idx


def _apply_gate(tensor: np.ndarray, gate: Gate, n: int) -> None:
    """Aplica `gate` in-place sobre um tensor (2,)*n + (lote,)."""
    if isinstance(gate, OpaqueUnitary):
        qubits = list(gate.qubits)
        k = len(qubits)
        moved = np.moveaxis(tensor, qubits, list(range(k)))
        shape = moved.shape
        updated = (gate.matrix @ moved.reshape(2 ** k, -1)).reshape(shape)
        tensor[...] = np.moveaxis(updated, list(range(k)), qubits)
        return

    u = _X if isinstance(gate, MultiControlledX) else gate.matrix()
    idx0 = _control_index(gate, n)
    idx1 = list(idx0)
    idx0[gate.target] = 0
    idx1[gate.target] = 1
    a0 = tensor[tuple(idx0)].copy()
    a1 = tensor[tuple(idx1)].copy()
    tensor[tuple(idx0)] = u[0, 0] * a0 + u[0, 1] * a1
    tensor[tuple(idx1)] = u[1, 0] * a0 + u[1, 1] * a1


def apply_gates(c: GateCircuit, states: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """
    Aplica o circuito a um lote de estados.

    Args:
        c: Circuito
        states: Array (2^n,) ou (2^n, lote)

    Returns:
        Array com a mesma forma de `states`
    """
    arr = np.asarray(states, dtype=np.complex128)
    n = c.num_qubits
    dim = 2 ** n
    if arr.shape[0] != dim:
        raise DimensionMismatchError("Estado incompatível com o circuito", qubits=n, size=arr.shape[0])
    single = arr.ndim == 1
    tensor = arr.reshape((2,) * n + (-1,)).copy()
    for gate in c.gates:
        _apply_gate(tensor, gate, n)
    out = tensor.reshape(dim, -1)
    return out[:, 0] if single else out


def apply(c: GateCircuit, s: Statevector) -> Statevector:
    """Aplica as portas em ordem de lista."""
    if s.num_qubits != c.num_qubits:
        raise DimensionMismatchError(
            "Número de qubits do estado difere do circuito", state=s.num_qubits, circuit=c.num_qubits
        )
    return Statevector(c.num_qubits, apply_gates(c, s.amplitudes))


def _check_cap(n: int) -> None:
    if n > settings.DENSE_QUBIT_CAP:
        raise DenseCapExceededError(n, settings.DENSE_QUBIT_CAP)


def circuit_unitary(c: GateCircuit) -> npt.NDArray[np.complex128]:
    """Matriz densa do circuito: coluna k = apply(c, |k⟩)."""
    _check_cap(c.num_qubits)
    with logger.timing("circuit_unitary"):
        return apply_gates(c, np.eye(2 ** c.num_qubits, dtype=np.complex128))


def gate_dense(gate: Gate, n: int) -> npt.NDArray[np.complex128]:
    """
    Matriz 2^n x 2^n de uma porta, montada por produtos de Kronecker.

    Independente de `apply`; usada como oráculo de consistência.
    """
    _check_cap(n)
    dim = 2 ** n
    if isinstance(gate, OpaqueUnitary):
        qubits = list(gate.qubits)
        rest = [q for q in range(n) if q not in qubits]
        full = np.kron(gate.matrix, np.eye(2 ** len(rest)))
        perm = qubits + rest
        inverse = list(np.argsort(perm))
        return full.reshape((2,) * (2 * n)).transpose(inverse + [n + i for i in inverse]).reshape(dim, dim)

    u = _X if isinstance(gate, MultiControlledX) else gate.matrix()
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    eye2 = np.eye(2, dtype=np.complex128)
    polarity = {c.qubit: c.polarity for c in gate.controls}

    active = np.ones((1, 1), dtype=np.complex128)
    projector = np.ones((1, 1), dtype=np.complex128)
    for q in range(n):
        if q == gate.target:
            active = np.kron(active, u)
            projector = np.kron(projector, eye2)
        elif q in polarity:
            proj = p1 if polarity[q] is Polarity.CLOSED else p0
            active = np.kron(active, proj)
            projector = np.kron(projector, proj)
        else:
            active = np.kron(active, eye2)
            projector = np.kron(projector, eye2)
    return np.eye(dim, dtype=np.complex128) - projector + active


def dense_product(c: GateCircuit) -> npt.NDArray[np.complex128]:
    """Produto das matrizes das portas em ordem inversa de lista."""
    out = np.eye(2 ** c.num_qubits, dtype=np.complex128)
    for gate in c.gates:
        out = gate_dense(gate, c.num_qubits) @ out
    return out


def extract_block(u: npt.ArrayLike, ancilla: Sequence[int], num_qubits: int) -> npt.NDArray[np.complex128]:
    """
    Sub-matriz ⟨0_anc| U |0_anc⟩ sobre o registro de sistema.

    Args:
        u: Unitária densa 2^n x 2^n
        ancilla: Qubits ancila (não vazio), projetados em |0⟩
        num_qubits: n
    """
    u = np.asarray(u, dtype=np.complex128)
    if not ancilla:
        raise ValidationException("Conjunto de ancilas vazio", field_errors={"ancilla": ["vazio"]})
    dim = 2 ** num_qubits
    if u.shape != (dim, dim):
        raise DimensionMismatchError("Unitária incompatível com o registro", shape=u.shape, qubits=num_qubits)
    mask = 0
    for q in ancilla:
        mask |= 1 << (num_qubits - 1 - q)
    rows = np.array([i for i in range(dim) if i & mask == 0], dtype=np.int64)
    return u[np.ix_(rows, rows)]


def max_abs_error(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if np.size(a) else 0.0
