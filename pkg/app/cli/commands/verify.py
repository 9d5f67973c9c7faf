"""
Subcomando `verify`: confere cada circuito sintetizado contra a string do termo.

O bloco com as ancilas em |0⟩ (ou a unitária inteira, sem ancilas) deve
coincidir com a matriz da string do termo de mesmo índice.
"""
import argparse
from pathlib import Path
from typing import List

from app.cli.support import check_params, new_manifest
from app.core.config import settings
from app.core.exceptions import EXIT_OK, DimensionMismatchError, VerificationFailure
from app.core.logging import get_logger
from app.core.pipeline import JsonArtifactLoader, JsonDocumentExtractor
from app.core.validation import CircuitValidator, NumericValidator, TermsValidator, ValidationResult, Validator
from app.models import ArtifactFactory, CircuitCheck, CircuitsDocument, TermsDocument, VerifyReport
from app.services.circuit import GateCircuit
from app.services.decompose import Term, format_string, term_matrix
from app.services.simverify import circuit_unitary, extract_block, max_abs_error

logger = get_logger(__name__)


class CircuitsValidator(Validator[CircuitsDocument]):
    def validate(self, data: CircuitsDocument) -> ValidationResult:
        result = ValidationResult()
        for i, circuit in enumerate(data.circuits):
            result.merge(CircuitValidator(f"circuits[{i}]").validate(circuit))
        return result


def circuit_error(circuit: GateCircuit, term: Term) -> float:
    u = circuit_unitary(circuit)
    block = extract_block(u, circuit.ancilla, circuit.num_qubits) if circuit.ancilla else u
    return max_abs_error(block, term_matrix(term.symbols).to_dense())


def build_report(circuits: List[GateCircuit], terms: List[Term], tol: float) -> VerifyReport:
    if len(circuits) != len(terms):
        raise DimensionMismatchError(
            "Número de circuitos difere do número de termos", circuits=len(circuits), terms=len(terms)
        )
    checks = []
    for index, (circuit, term) in enumerate(zip(circuits, terms)):
        error = circuit_error(circuit, term)
        checks.append(CircuitCheck(index=index, string=format_string(term.symbols), max_error=error))
        if error > tol:
            logger.warning("Circuito fora da tolerância", index=index, max_error=error)
    worst = max((c.max_error for c in checks), default=0.0)
    return VerifyReport(tolerance=tol, max_error=worst, passed=worst <= tol, checks=checks)


def handle(args: argparse.Namespace) -> int:
    check_params((NumericValidator("--tol", allow_zero=False, allow_negative=False), args.tol))
    manifest = new_manifest(
        "verify",
        args,
        inputs={"circuits": args.circuits, "against": args.against},
        outputs={"report": args.report},
    )

    circuits_doc = JsonDocumentExtractor(args.circuits, CircuitsDocument, CircuitsValidator()).extract()
    terms_doc = JsonDocumentExtractor(args.against, TermsDocument, TermsValidator()).extract()
    circuits = [ArtifactFactory.circuit_from_document(c) for c in circuits_doc.circuits]
    terms = list(ArtifactFactory.terms_from_document(terms_doc).terms)

    with logger.timing("verify"):
        report = build_report(circuits, terms, args.tol)
    JsonArtifactLoader(args.report, manifest).load(report)

    if not report.passed:
        raise VerificationFailure(
            f"{sum(c.max_error > args.tol for c in report.checks)} circuito(s) fora da tolerância",
            report=report.model_dump(mode="json", exclude={"manifest"}),
        )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "verify",
        help="Verifica circuitos sintetizados contra os termos de origem",
        description="Sai com 2 se algum circuito tiver erro acima de --tol.",
    )
    parser.add_argument("--circuits", type=Path, required=True, help="Circuitos (JSON de synthesize)")
    parser.add_argument("--against", type=Path, required=True, help="Termos de origem (JSON de decompose)")
    parser.add_argument("--report", type=Path, required=True, help="Relatório de saída (JSON)")
    parser.add_argument("--tol", type=float, default=settings.UNITARY_TOL, help="Tolerância por circuito")
    parser.set_defaults(handler=handle)
