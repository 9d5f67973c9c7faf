"""
Implementações concretas de validadores.

Os validadores de documento verificam regras que o schema pydantic não
expressa sozinho (faixas de índices, formas dependentes de n e k,
duplicatas) e nomeiam o campo problemático com o caminho completo.

Classes:
    NumericValidator: Validador para parâmetros numéricos da CLI
    MatrixValidator: Validador para documentos de matriz esparsa
    PolynomialSystemValidator: Validador para sistemas polinomiais
    TermsValidator: Validador para listas de termos Pauli/Sigma
    CircuitValidator: Validador para documentos de circuito
"""
import math
from typing import Optional, Set, Tuple, Union

from app.core.config import settings
from app.core.validation.interface import ValidationResult, Validator, join_path
from app.models.circuit import (
    CircuitDocument,
    McxGateDocument,
    OpaqueGateDocument,
    SingleGateDocument,
)
from app.models.matrix import MatrixBody, SystemDocument
from app.models.terms import TermsDocument

_PAULI_ALPHABET = frozenset("IXYZ")
_SIGMA_ALPHABET = frozenset({"I2", "PLUS", "MINUS", "PM", "MP"})


class NumericValidator(Validator[Union[int, float]]):
    """
    Validador para valores numéricos.

    Verifica se um número atende a critérios como valor mínimo/máximo,
    se é inteiro quando necessário e se é finito.

    Example:
        >>> validator = NumericValidator("--qubits", min_value=1, is_integer=True)
        >>> validator.validate(6).is_valid
        True
    """

    def __init__(
        self,
        field_name: str,
        min_value: Optional[float] = None,
        max_value: Optional[float] = None,
        required: bool = True,
        allow_zero: bool = True,
        allow_negative: bool = True,
        is_integer: bool = False
    ):
        self.field_name = field_name
        self.min_value = min_value
        self.max_value = max_value
        self.required = required
        self.allow_zero = allow_zero
        self.allow_negative = allow_negative
        self.is_integer = is_integer

    def validate(self, data: Optional[Union[int, float]]) -> ValidationResult:
        """Valida um valor numérico."""
        result = ValidationResult()
        if not result.require(data, self.field_name, self.required):
            return result

        if isinstance(data, float) and not math.isfinite(data):
            result.error(self.field_name, "Valor numérico não finito", str(data))
            return result

        if self.is_integer and not isinstance(data, int) and int(data) != data:
            result.error(self.field_name, "Valor deve ser um número inteiro", data)

        if data == 0 and not self.allow_zero:
            result.error(self.field_name, "Valor zero não permitido", data)

        if data < 0 and not self.allow_negative:
            result.error(self.field_name, "Valor negativo não permitido", data)

        if self.min_value is not None and data < self.min_value:
            result.error(
                self.field_name,
                f"Valor menor que o mínimo permitido ({self.min_value})",
                data,
                min_value=self.min_value,
            )

        if self.max_value is not None and data > self.max_value:
            result.error(
                self.field_name,
                f"Valor maior que o máximo permitido ({self.max_value})",
                data,
                max_value=self.max_value,
            )

        return result


class MatrixValidator(Validator[MatrixBody]):
    """
    Validador para matrizes em lista de coordenadas.

    Regras: índices dentro da forma declarada, sem pares (linha, coluna)
    repetidos e valores finitos. Com `shape` fixa, a forma também é conferida.
    Valores abaixo de ZERO_TOL geram só um aviso.
    """

    def __init__(self, field_name: str = "", shape: Optional[Tuple[int, int]] = None):
        self.field_name = field_name
        self.shape = shape

    def _path(self, suffix: str) -> str:
        return join_path(self.field_name, suffix)

    def validate(self, data: MatrixBody) -> ValidationResult:
        result = ValidationResult()
        if not result.require(data, self.field_name or "matrix"):
            return result

        if self.shape is not None and (data.rows, data.cols) != self.shape:
            result.error(
                self._path("rows/cols"),
                f"Forma {data.rows}x{data.cols} difere da esperada {self.shape[0]}x{self.shape[1]}",
                (data.rows, data.cols),
            )

        seen: Set[Tuple[int, int]] = set()
        for i, (r, c, re, im) in enumerate(data.entries):
            if not 0 <= r < data.rows:
                result.error(self._path(f"entries[{i}].row"), f"Linha {r} fora de [0, {data.rows})", r)
            if not 0 <= c < data.cols:
                result.error(self._path(f"entries[{i}].col"), f"Coluna {c} fora de [0, {data.cols})", c)
            if not (math.isfinite(re) and math.isfinite(im)):
                result.error(self._path(f"entries[{i}].value"), "Valor não finito", (re, im))
            elif abs(complex(re, im)) < settings.ZERO_TOL:
                result.warn(
                    self._path(f"entries[{i}].value"),
                    "Valor abaixo da tolerância de zero; a entrada será descartada",
                    (re, im),
                )
            if (r, c) in seen:
                result.error(self._path(f"entries[{i}]"), f"Par ({r}, {c}) repetido", (r, c))
            seen.add((r, c))

        return result


class PolynomialSystemValidator(Validator[SystemDocument]):
    """
    Validador para sistemas dΦ/dt = Σ_k M_k(t) Φ^{⊗k}.

    Cada coeficiente M_k precisa ter forma n x n^k com 0 ≤ k ≤ p; termos com
    potência de t não nula exigem `time_dependent = true`.
    """

    def validate(self, data: SystemDocument) -> ValidationResult:
        result = ValidationResult()
        n, p = data.n, data.p

        for i, coefficient in enumerate(data.M):
            prefix = f"M[{i}]"
            if coefficient.k > p:
                result.error(f"{prefix}.k", f"Grau {coefficient.k} acima de p={p}", coefficient.k)
                continue
            expected = (n, n ** coefficient.k)
            result.merge(
                MatrixValidator("matrix", shape=expected).validate(coefficient.matrix), prefix=prefix
            )
            if coefficient.t_power > 0 and not data.time_dependent:
                result.error(
                    f"{prefix}.t_power",
                    "Termo dependente de t em sistema marcado como autônomo",
                    coefficient.t_power,
                )

        if data.initial_state and len(data.initial_state) != n:
            result.error(
                "initial_state",
                f"Estado inicial com {len(data.initial_state)} componentes, esperado {n}",
                len(data.initial_state),
            )

        return result


class TermsValidator(Validator[TermsDocument]):
    """Validador para listas de termos: alfabeto, comprimento, coeficientes e duplicatas."""

    def validate(self, data: TermsDocument) -> ValidationResult:
        result = ValidationResult()
        alphabet = _PAULI_ALPHABET if data.basis == "pauli" else _SIGMA_ALPHABET
        seen: Set[Tuple[str, ...]] = set()

        for i, term in enumerate(data.terms):
            field = f"terms[{i}]"
            if data.basis == "pauli":
                symbols = tuple(term.string.strip())
            else:
                symbols = tuple(tok.strip() for tok in term.string.split(",") if tok.strip())

            unknown = [s for s in symbols if s not in alphabet]
            if unknown:
                result.error(f"{field}.string", f"Símbolos fora do alfabeto {data.basis}: {unknown}", term.string)
            elif len(symbols) != data.n:
                result.error(
                    f"{field}.string",
                    f"String com {len(symbols)} símbolos, esperado {data.n}",
                    term.string,
                )

            re, im = term.coeff
            if not (math.isfinite(re) and math.isfinite(im)):
                result.error(f"{field}.coeff", "Coeficiente não finito", term.coeff)
            elif re == 0.0 and im == 0.0:
                result.error(f"{field}.coeff", "Coeficiente nulo", term.coeff)

            if symbols in seen:
                result.error(f"{field}.string", "String repetida", term.string)
            seen.add(symbols)

        return result


class CircuitValidator(Validator[CircuitDocument]):
    """Validador para circuitos: qubits dentro do registro e controles distintos do alvo."""

    def __init__(self, field_name: str = ""):
        self.field_name = field_name

    def _path(self, suffix: str) -> str:
        return join_path(self.field_name, suffix)

    def validate(self, data: CircuitDocument) -> ValidationResult:
        result = ValidationResult()
        width = data.qubits

        for i, q in enumerate(data.ancilla):
            if not 0 <= q < width:
                result.error(self._path(f"ancilla[{i}]"), f"Qubit {q} fora de [0, {width})", q)
        if len(set(data.ancilla)) != len(data.ancilla):
            result.error(self._path("ancilla"), "Ancilas repetidas", list(data.ancilla))

        for i, gate in enumerate(data.gates):
            field = self._path(f"gates[{i}]")
            if isinstance(gate, OpaqueGateDocument):
                touched = list(gate.qubits)
                dim = 2 ** len(touched)
                if len(gate.matrix) != dim or any(len(row) != dim for row in gate.matrix):
                    result.error(f"{field}.matrix", f"Matriz deve ser {dim}x{dim}", len(gate.matrix))
            else:
                touched = [gate.target]
                if isinstance(gate, (SingleGateDocument, McxGateDocument)):
                    touched += [q for q, _ in gate.controls]
            for q in touched:
                if not 0 <= q < width:
                    result.error(f"{field}", f"Qubit {q} fora de [0, {width})", q)
            if len(set(touched)) != len(touched):
                result.error(f"{field}", "Qubits repetidos entre alvo e controles", touched)

        return result
