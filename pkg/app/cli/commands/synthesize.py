"""
Subcomando `synthesize`: um circuito U_j por termo.

Base sigma: U_j = U_{j,a} U_{j,b} sobre ancila + n qubits de sistema.
Base pauli: a própria string como portas de um qubit, sem ancila.
"""
import argparse
from pathlib import Path

from app.cli.support import new_manifest
from app.core.exceptions import EXIT_OK, ValidationException
from app.core.pipeline import JsonArtifactLoader, JsonDocumentExtractor, Pipeline
from app.core.validation import TermsValidator
from app.models import ArtifactFactory, CircuitsDocument, TermsDocument
from app.services.blockenc import pauli_branch
from app.services.circuit import (
    GateCircuit,
    SigmaString,
    build_uj,
    build_ujb,
    merge_cnx,
    row_pattern_synthesis,
    row_patterns,
)
from app.services.decompose import Basis, Term, TermDecomposition


def circuit_for(term: Term, basis: Basis, from_row_patterns: bool = False) -> GateCircuit:
    if basis is Basis.PAULI:
        return pauli_branch(term.symbols)
    s = SigmaString(term.symbols)
    if not from_row_patterns:
        return build_uj(s)
    # um C^nX por linha não nula, depois fusão até sobrar o C^kX de U_{j,a}
    uja = merge_cnx(row_pattern_synthesis(row_patterns(s), len(s)))
    return build_ujb(s).then(uja)


def _to_document(d: TermDecomposition, from_row_patterns: bool) -> CircuitsDocument:
    return CircuitsDocument(
        n=d.n,
        basis=d.basis.value,
        circuits=[
            ArtifactFactory.circuit_to_document(circuit_for(t, d.basis, from_row_patterns), t)
            for t in d.terms
        ],
    )


def handle(args: argparse.Namespace) -> int:
    manifest = new_manifest("synthesize", args, inputs={"terms": args.terms}, outputs={"out": args.out})

    def convert(d: TermDecomposition) -> CircuitsDocument:
        if args.row_patterns and d.basis is not Basis.SIGMA:
            raise ValidationException(
                "--row-patterns só se aplica à base sigma", field_errors={"--row-patterns": [d.basis.value]}
            )
        return _to_document(d, args.row_patterns)

    (
        Pipeline("synthesize")
        .add_extractor(JsonDocumentExtractor(args.terms, TermsDocument, TermsValidator()))
        .add_step(ArtifactFactory.terms_from_document)
        .add_step(convert, "build_uj")
        .add_loader(JsonArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "synthesize",
        help="Sintetiza um circuito por termo de uma decomposição",
        description="Na base sigma gera U_j com ancila no qubit 0; na base pauli, a string de portas.",
    )
    parser.add_argument("--terms", type=Path, required=True, help="Termos de entrada (JSON)")
    parser.add_argument(
        "--row-patterns",
        action="store_true",
        help="Gera U_{j,a} com um C^nX por padrão de linha e funde os C^nX adjacentes",
    )
    parser.add_argument("--out", type=Path, required=True, help="Circuitos de saída (JSON)")
    parser.set_defaults(handler=handle)
