"""
Decomposição de matrizes 2^n x 2^n em somas ponderadas de strings de operadores.

Duas bases estão disponíveis, cada uma como uma estratégia:
    - Pauli ({I, X, Y, Z}): coeficientes c = Tr(P† H) / 2^n
    - Sigma ({I2, PLUS, MINUS, PM, MP}): um termo por entrada não nula

O qubit mais significativo é o primeiro fator do produto tensorial.
"""
from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import NonPowerOfTwoError, ValidationException
from app.core.logging import get_logger
from app.services.tensorcore import (
    SparseComplexMatrix,
    from_dense,
    is_power_of_two,
    kron_all,
    num_qubits_for,
    pad_to_power_of_two,
)

logger = get_logger(__name__)


class Basis(str, Enum):
    PAULI = "pauli"
    SIGMA = "sigma"


class PauliSymbol(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


class SigmaSymbol(str, Enum):
    I2 = "I2"
    PLUS = "PLUS"    # |0⟩⟨1|
    MINUS = "MINUS"  # |1⟩⟨0|
    PM = "PM"        # |0⟩⟨0|
    MP = "MP"        # |1⟩⟨1|


Symbol = Union[PauliSymbol, SigmaSymbol]

SYMBOL_MATRICES: Dict[Symbol, np.ndarray] = {
    PauliSymbol.I: np.eye(2, dtype=np.complex128),
    PauliSymbol.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    PauliSymbol.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    PauliSymbol.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    SigmaSymbol.I2: np.eye(2, dtype=np.complex128),
    SigmaSymbol.PLUS: np.array([[0, 1], [0, 0]], dtype=np.complex128),
    SigmaSymbol.MINUS: np.array([[0, 0], [1, 0]], dtype=np.complex128),
    SigmaSymbol.PM: np.array([[1, 0], [0, 0]], dtype=np.complex128),
    SigmaSymbol.MP: np.array([[0, 0], [0, 1]], dtype=np.complex128),
}

# (bit da linha, bit da coluna) -> símbolo
_SIGMA_BY_BITS: Dict[Tuple[int, int], SigmaSymbol] = {
    (0, 0): SigmaSymbol.PM,
    (1, 1): SigmaSymbol.MP,
    (0, 1): SigmaSymbol.PLUS,
    (1, 0): SigmaSymbol.MINUS,
}

_PAULI_ORDER = {s: i for i, s in enumerate(PauliSymbol)}


def symbol_matrix(symbol: Symbol) -> SparseComplexMatrix:
    return from_dense(SYMBOL_MATRICES[symbol])


@dataclass(frozen=True)
class Term:
    coefficient: complex
    symbols: Tuple[Symbol, ...]


@dataclass(frozen=True)
class TermDecomposition:
    """
    Lista de termos (α_j, string) sobre um único alfabeto.

    Attributes:
        n: Número de qubits
        basis: Alfabeto dos termos
        terms: Termos sem coeficientes nulos e sem strings repetidas
    """

    n: int
    basis: Basis
    terms: Tuple[Term, ...]

    def __post_init__(self) -> None:
        alphabet = PauliSymbol if self.basis == Basis.PAULI else SigmaSymbol
        seen = set()
        for idx, term in enumerate(self.terms):
            if len(term.symbols) != self.n:
                raise ValidationException(
                    "String com comprimento diferente de n",
                    field_errors={f"terms[{idx}].string": [f"{len(term.symbols)} != {self.n}"]},
                )
            if any(not isinstance(s, alphabet) for s in term.symbols):
                raise ValidationException(
                    "Símbolo fora do alfabeto da base",
                    field_errors={f"terms[{idx}].string": [format_string(term.symbols)]},
                )
            if abs(term.coefficient) < settings.ZERO_TOL:
                raise ValidationException(
                    "Coeficiente nulo", field_errors={f"terms[{idx}].coeff": [str(term.coefficient)]}
                )
            if term.symbols in seen:
                raise ValidationException(
                    "String repetida", field_errors={f"terms[{idx}].string": [format_string(term.symbols)]}
                )
            seen.add(term.symbols)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> List[complex]:
        return [t.coefficient for t in self.terms]

    @property
    def one_norm(self) -> float:
        """λ = Σ_j |α_j|."""
        return float(sum(abs(c) for c in self.coefficients))


# ----- formato textual das strings -----

def format_string(symbols: Sequence[Symbol]) -> str:
    """Pauli como "IXYZ"; Sigma como "PM,PLUS,I2"."""
    if symbols and isinstance(symbols[0], PauliSymbol):
        return "".join(s.value for s in symbols)
    return ",".join(s.value for s in symbols)


def parse_string(text: str, basis: Basis) -> Tuple[Symbol, ...]:
    try:
        if basis == Basis.PAULI:
            return tuple(PauliSymbol(ch) for ch in text.strip())
        return tuple(SigmaSymbol(tok.strip()) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationException(
            f"String de operadores inválida para a base {basis.value}",
            field_errors={"string": [text]},
            original_exception=exc,
        ) from exc


# ----- estratégias -----

def _check_register(h: SparseComplexMatrix) -> int:
    if h.rows != h.cols or not is_power_of_two(h.rows):
        raise NonPowerOfTwoError(h.rows, h.cols)
    return num_qubits_for(h.rows)


def _bit(values: np.ndarray, q: int, n: int) -> np.ndarray:
    return (values >> (n - 1 - q)) & 1


class DecompositionStrategy(ABC):
    """Interface para decomposições em uma base de strings de operadores."""

    basis: Basis

    @abstractmethod
    def decompose(self, h: SparseComplexMatrix) -> TermDecomposition:
        """
        Decompõe h em termos da base.

        Args:
            h: Matriz 2^n x 2^n

        Returns:
            Decomposição cuja reconstrução é h
        """


class PauliDecomposition(DecompositionStrategy):
    """
    Produto interno de traço com cada string de Pauli.

    Cada string é uma permutação com sinal: a entrada (r, c) é não nula só
    quando r XOR c coincide com a máscara das posições X/Y. Por isso o
    traço é uma varredura sobre os não nulos de h, e máscaras ausentes de h
    são puladas inteiras.
    """

    basis = Basis.PAULI

    def decompose(self, h: SparseComplexMatrix) -> TermDecomposition:
        n = _check_register(h)
        rows, cols, values = h.row_idx, h.col_idx, h.values
        xor = rows ^ cols
        scale = 1.0 / (2 ** n)

        terms: List[Term] = []
        for mask in np.unique(xor):
            sel = xor == mask
            r, v = rows[sel], values[sel]
            flips = [bool((int(mask) >> (n - 1 - q)) & 1) for q in range(n)]
            row_bits = [_bit(r, q, n) for q in range(n)]

            choices = [
                (PauliSymbol.X, PauliSymbol.Y) if flip else (PauliSymbol.I, PauliSymbol.Z)
                for flip in flips
            ]
            for symbols in itertools.product(*choices):
                phase = np.ones(r.size, dtype=np.complex128)
                for q, symbol in enumerate(symbols):
                    if symbol is PauliSymbol.Z:
                        phase *= 1 - 2 * row_bits[q]
                    elif symbol is PauliSymbol.Y:
                        phase *= np.where(row_bits[q] == 0, -1j, 1j)
                coefficient = complex(np.sum(np.conj(phase) * v) * scale)
                if abs(coefficient) >= settings.ZERO_TOL:
                    terms.append(Term(coefficient, symbols))

        terms.sort(key=lambda t: [_PAULI_ORDER[s] for s in t.symbols])
        return TermDecomposition(n=n, basis=self.basis, terms=tuple(terms))


class SigmaDecomposition(DecompositionStrategy):
    """Um termo por entrada não nula, na ordem canônica (linha, coluna)."""

    basis = Basis.SIGMA

    def decompose(self, h: SparseComplexMatrix) -> TermDecomposition:
        n = _check_register(h)
        terms = []
        for r, c, v in h.entries:
            symbols = tuple(
                _SIGMA_BY_BITS[((r >> (n - 1 - q)) & 1, (c >> (n - 1 - q)) & 1)] for q in range(n)
            )
            terms.append(Term(v, symbols))
        return TermDecomposition(n=n, basis=self.basis, terms=tuple(terms))


_STRATEGIES: Dict[Basis, DecompositionStrategy] = {
    Basis.PAULI: PauliDecomposition(),
    Basis.SIGMA: SigmaDecomposition(),
}


def get_strategy(basis: Union[Basis, str]) -> DecompositionStrategy:
    try:
        return _STRATEGIES[Basis(basis)]
    except ValueError as exc:
        raise ValidationException(
            f"Base desconhecida: {basis}", field_errors={"basis": [str(basis)]}, original_exception=exc
        ) from exc


# ----- operações -----

def pauli_decompose(h: SparseComplexMatrix) -> TermDecomposition:
    return _STRATEGIES[Basis.PAULI].decompose(h)


def sigma_decompose(h: SparseComplexMatrix) -> TermDecomposition:
    return _STRATEGIES[Basis.SIGMA].decompose(h)


def merge_identity_pairs(d: TermDecomposition) -> TermDecomposition:
    """
    Funde pares de termos com mesmo coeficiente que diferem só por PM/MP
    em uma posição, trocando essa posição por I2. Repete até o ponto fixo.
    """
    if d.basis != Basis.SIGMA:
        raise ValidationException(
            "merge_identity_pairs exige base sigma", field_errors={"basis": [d.basis.value]}
        )

    current: Dict[Tuple[Symbol, ...], complex] = {t.symbols: t.coefficient for t in d.terms}
    order: List[Tuple[Symbol, ...]] = [t.symbols for t in d.terms]
    merges = 0

    changed = True
    while changed:
        changed = False
        for symbols in order:
            if symbols not in current:
                continue
            for q, symbol in enumerate(symbols):
                if symbol is not SigmaSymbol.PM:
                    continue
                partner = symbols[:q] + (SigmaSymbol.MP,) + symbols[q + 1:]
                if partner not in current:
                    continue
                if abs(current[symbols] - current[partner]) > settings.ZERO_TOL:
                    continue
                merged = symbols[:q] + (SigmaSymbol.I2,) + symbols[q + 1:]
                coefficient = current.pop(symbols)
                current.pop(partner)
                total = current.get(merged, 0.0) + coefficient
                if abs(total) >= settings.ZERO_TOL:
                    if merged not in current:
                        order.append(merged)
                    current[merged] = total
                else:
                    current.pop(merged, None)
                merges += 1
                changed = True
                break
            if changed:
                break

    logger.debug("Fusão de pares PM/MP", merges=merges, terms=len(current))
    terms = tuple(Term(current[s], s) for s in order if s in current)
    return TermDecomposition(n=d.n, basis=d.basis, terms=terms)


def term_matrix(symbols: Sequence[Symbol]) -> SparseComplexMatrix:
    """Produto tensorial dos símbolos (primeiro símbolo = fator mais significativo)."""
    return kron_all([symbol_matrix(s) for s in symbols])


def reconstruct(d: TermDecomposition) -> SparseComplexMatrix:
    """Σ_j α_j · ⊗ símbolos_j."""
    dim = 2 ** d.n
    acc = SparseComplexMatrix.zeros(dim, dim).to_scipy()
    for term in d.terms:
        acc = acc + term_matrix(term.symbols).to_scipy() * term.coefficient
    return SparseComplexMatrix.from_scipy(acc)


def is_real_decomposition(d: TermDecomposition, tol: float = 1e-12) -> bool:
    """True se todos os coeficientes forem reais dentro de `tol`."""
    return all(abs(c.imag) <= tol for c in d.coefficients)


def term_count_study(inputs: Iterable[Tuple[str, SparseComplexMatrix]]) -> pd.DataFrame:
    """
    Contagem de termos Pauli vs Sigma por matriz.

    Matrizes fora de 2^n x 2^n (ex.: Carleman) são completadas com zeros
    até a próxima potência de dois, o que não altera o número de não nulos.

    Returns:
        DataFrame com colunas label, dim, nnz, pauli_terms, sigma_terms
    """
    rows = []
    with logger.timing("term_count_study"):
        for label, matrix in inputs:
            padded = pad_to_power_of_two(matrix)
            pauli = pauli_decompose(padded)
            sigma = sigma_decompose(padded)
            rows.append(
                {
                    "label": label,
                    "dim": padded.rows,
                    "nnz": padded.nnz,
                    "pauli_terms": len(pauli),
                    "sigma_terms": len(sigma),
                }
            )
            logger.debug("Contagem de termos", label=label, pauli=len(pauli), sigma=len(sigma))
    return pd.DataFrame(rows, columns=["label", "dim", "nnz", "pauli_terms", "sigma_terms"])
