"""
Subcomando `encode`: block encoding PREP → SELECT → PREP† de uma matriz.
"""
import argparse
from pathlib import Path

from app.cli.support import check_params, new_manifest, read_matrix, register_matrix
from app.core.config import settings
from app.core.exceptions import EXIT_OK, ValidationException, VerificationFailure
from app.core.pipeline import JsonArtifactLoader
from app.core.validation import NumericValidator
from app.models import ArtifactFactory
from app.services.blockenc import block_encode, verify_block_encoding
from app.services.decompose import Basis, get_strategy, merge_identity_pairs


def handle(args: argparse.Namespace) -> int:
    basis = Basis(args.basis)
    if args.merge and basis is not Basis.SIGMA:
        raise ValidationException("--merge só se aplica à base sigma", field_errors={"--merge": [args.basis]})
    check_params((NumericValidator("--tol", allow_zero=False, allow_negative=False), args.tol))
    manifest = new_manifest("encode", args, inputs={"matrix": args.matrix}, outputs={"out": args.out})

    h, _ = register_matrix(read_matrix(args.matrix), str(args.matrix))
    decomposition = get_strategy(basis).decompose(h)
    if args.merge:
        decomposition = merge_identity_pairs(decomposition)

    encoding = block_encode(h, basis, fanout=args.fanout, decomposition=decomposition)
    report = verify_block_encoding(encoding, h, tol=args.tol, raise_on_failure=False) if args.verify else None

    JsonArtifactLoader(args.out, manifest).load(ArtifactFactory.encoding_to_document(encoding, report))

    if report is not None and report["max_block_error"] > args.tol:
        raise VerificationFailure("Bloco codificado difere de H/λ", report=report)
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "encode",
        help="Monta o block encoding de uma matriz",
        description="O bloco com ancilas em |0⟩ é H/λ, λ = Σ|α_j|. Com --verify, sai com 2 se o erro passar de --tol.",
    )
    parser.add_argument("--matrix", type=Path, required=True, help="Matriz de entrada (JSON)")
    parser.add_argument("--basis", choices=[b.value for b in Basis], default=Basis.SIGMA.value, help="Alfabeto")
    parser.add_argument("--merge", action="store_true", help="Funde pares PM/MP antes de codificar (sigma)")
    parser.add_argument(
        "--fanout",
        action="store_true",
        help=(
            "SELECT com flag e ancilas de fan-out: k + 1 + 2n qubits (mais 1 na base sigma). "
            "Com --verify o total precisa caber em CARLEMAN_DENSE_QUBIT_CAP (12); "
            "ex.: 8x8 denso na base pauli dá 13 qubits e sai com 1"
        ),
    )
    parser.add_argument("--verify", action="store_true", help="Simula o circuito e compara o bloco com H/λ")
    parser.add_argument("--tol", type=float, default=settings.UNITARY_TOL, help="Tolerância da verificação")
    parser.add_argument("--out", type=Path, required=True, help="Block encoding de saída (JSON)")
    parser.set_defaults(handler=handle)
