"""
Fábricas para converter documentos em valores de domínio e vice-versa.

Implementa o padrão Factory: `ModelFactory` valida dicionários brutos contra
um documento pydantic e `ArtifactFactory` faz a ponte documento <-> serviço.
"""
from typing import Any, Dict, Generic, List, Optional, Type, TypeVar

import numpy as np
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from app.core.exceptions import ValidationException, handle_exception
from app.core.logging import get_logger
from app.models.circuit import (
    CircuitDocument,
    McxGateDocument,
    OpaqueGateDocument,
    SingleGateDocument,
    XGateDocument,
)
from app.models.matrix import MatrixBody, MatrixDocument, SystemDocument
from app.models.reports import BlockReport, EncodingDocument
from app.models.terms import TermDocument, TermsDocument
from app.services.blockenc import BlockEncoding
from app.services.carleman import PolynomialSystem
from app.services.circuit import (
    Control,
    Gate,
    GateCircuit,
    GateLabel,
    MultiControlledX,
    OpaqueUnitary,
    Polarity,
    SingleQubitGate,
    resource_summary,
)
from app.services.decompose import Basis, Term, TermDecomposition, format_string, parse_string
from app.services.tensorcore import SparseComplexMatrix

logger = get_logger(__name__)

T = TypeVar("T", bound=BaseModel)


class ModelFactory(Generic[T]):
    """Fábrica base para criar documentos a partir de dados brutos."""

    def __init__(self, model_class: Type[T]):
        """
        Inicializa a fábrica com a classe do documento.

        Args:
            model_class: Classe do documento a ser criado
        """
        self.model_class = model_class

    def create_from_dict(self, data: Dict[str, Any]) -> T:
        """
        Cria uma instância do documento a partir de um dicionário.

        Raises:
            ValidationException: com os campos inválidos em `field_errors`
        """
        try:
            return self.model_class.model_validate(data)
        except PydanticValidationError as e:
            logger.debug(f"Documento {self.model_class.__name__} inválido", errors=e.error_count())
            raise handle_exception(e) from e


class ArtifactFactory:
    """Conversões entre documentos pydantic e tipos dos serviços."""

    # ----- matrizes -----

    @staticmethod
    def matrix_from_document(doc: MatrixBody) -> SparseComplexMatrix:
        rows = [e[0] for e in doc.entries]
        cols = [e[1] for e in doc.entries]
        values = [complex(e[2], e[3]) for e in doc.entries]
        return SparseComplexMatrix(doc.rows, doc.cols, rows, cols, values)

    @staticmethod
    def matrix_to_document(m: SparseComplexMatrix, meta: Optional[Dict[str, Any]] = None) -> MatrixDocument:
        entries = [(r, c, float(v.real), float(v.imag)) for r, c, v in m.entries]
        return MatrixDocument(rows=m.rows, cols=m.cols, entries=entries, meta=meta or {})

    # ----- sistemas -----

    @staticmethod
    def system_from_document(doc: SystemDocument) -> PolynomialSystem:
        terms = [
            (c.k, c.t_power, ArtifactFactory.matrix_from_document(c.matrix)) for c in doc.M
        ]
        return PolynomialSystem.from_time_polynomials(doc.n, doc.p, terms)

    @staticmethod
    def initial_state(doc: SystemDocument) -> np.ndarray:
        if not doc.initial_state:
            raise ValidationException(
                "Sistema sem estado inicial", field_errors={"initial_state": ["ausente"]}
            )
        return np.array([complex(re, im) for re, im in doc.initial_state], dtype=np.complex128)

    # ----- termos -----

    @staticmethod
    def terms_from_document(doc: TermsDocument) -> TermDecomposition:
        basis = Basis(doc.basis)
        terms = [
            Term(complex(t.coeff[0], t.coeff[1]), parse_string(t.string, basis)) for t in doc.terms
        ]
        return TermDecomposition(n=doc.n, basis=basis, terms=tuple(terms))

    @staticmethod
    def term_to_document(term: Term) -> TermDocument:
        c = complex(term.coefficient)
        return TermDocument(coeff=(c.real, c.imag), string=format_string(term.symbols))

    @staticmethod
    def terms_to_document(d: TermDecomposition) -> TermsDocument:
        return TermsDocument(
            n=d.n,
            basis=d.basis.value,
            terms=[ArtifactFactory.term_to_document(t) for t in d.terms],
        )

    # ----- circuitos -----

    @staticmethod
    def _controls(rows: List[Any]) -> tuple:
        return tuple(Control(int(q), Polarity(p)) for q, p in rows)

    @staticmethod
    def gate_from_document(doc: BaseModel) -> Gate:
        if isinstance(doc, XGateDocument):
            return SingleQubitGate(doc.target, GateLabel.X)
        if isinstance(doc, SingleGateDocument):
            return SingleQubitGate(
                doc.target, GateLabel(doc.label), doc.theta, ArtifactFactory._controls(doc.controls)
            )
        if isinstance(doc, McxGateDocument):
            return MultiControlledX(doc.target, ArtifactFactory._controls(doc.controls))
        if isinstance(doc, OpaqueGateDocument):
            matrix = np.array([[complex(re, im) for re, im in row] for row in doc.matrix], dtype=np.complex128)
            return OpaqueUnitary(tuple(doc.qubits), matrix, doc.label)
        raise ValidationException("Tipo de porta desconhecido", field_errors={"kind": [type(doc).__name__]})

    @staticmethod
    def gate_to_document(gate: Gate) -> BaseModel:
        if isinstance(gate, MultiControlledX):
            return McxGateDocument(
                target=gate.target, controls=[(c.qubit, c.polarity.value) for c in gate.controls]
            )
        if isinstance(gate, OpaqueUnitary):
            matrix = [[(float(v.real), float(v.imag)) for v in row] for row in gate.matrix]
            return OpaqueGateDocument(qubits=list(gate.qubits), matrix=matrix, label=gate.label)
        if gate.label is GateLabel.X and not gate.controls:
            return XGateDocument(target=gate.target)
        return SingleGateDocument(
            label=gate.label.value,
            target=gate.target,
            theta=gate.theta,
            controls=[(c.qubit, c.polarity.value) for c in gate.controls],
        )

    @staticmethod
    def circuit_from_document(doc: CircuitDocument) -> GateCircuit:
        gates = tuple(ArtifactFactory.gate_from_document(g) for g in doc.gates)
        return GateCircuit(doc.qubits, gates, tuple(doc.ancilla))

    @staticmethod
    def circuit_to_document(c: GateCircuit, term: Optional[Term] = None) -> CircuitDocument:
        return CircuitDocument(
            qubits=c.num_qubits,
            ancilla=list(c.ancilla),
            gates=[ArtifactFactory.gate_to_document(g) for g in c.gates],
            term=ArtifactFactory.term_to_document(term) if term is not None else None,
            resources=resource_summary(c),
        )

    # ----- block encoding -----

    @staticmethod
    def encoding_to_document(
        encoding: BlockEncoding, report: Optional[Dict[str, Any]] = None
    ) -> EncodingDocument:
        return EncodingDocument(
            basis=encoding.basis.value,
            lambda_=encoding.normalization,
            selection=list(encoding.selection),
            completion=encoding.completion,
            fanout=list(encoding.fanout),
            system=list(encoding.system),
            circuit=ArtifactFactory.circuit_to_document(encoding.circuit),
            verification=BlockReport.model_validate(report) if report else None,
        )
