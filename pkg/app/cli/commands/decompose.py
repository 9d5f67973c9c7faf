"""
Subcomando `decompose`: matriz -> termos Pauli ou Sigma.
"""
import argparse
from pathlib import Path

from app.cli.support import new_manifest, read_matrix, register_matrix
from app.core.exceptions import EXIT_OK, ValidationException
from app.core.pipeline import JsonArtifactLoader, Pipeline
from app.models import ArtifactFactory
from app.services.decompose import Basis, get_strategy, merge_identity_pairs


def handle(args: argparse.Namespace) -> int:
    basis = Basis(args.basis)
    if args.merge and basis is not Basis.SIGMA:
        raise ValidationException("--merge só se aplica à base sigma", field_errors={"--merge": [args.basis]})
    manifest = new_manifest("decompose", args, inputs={"matrix": args.matrix}, outputs={"out": args.out})

    padded_from = None

    def load():
        nonlocal padded_from
        matrix, padded_from = register_matrix(read_matrix(args.matrix), str(args.matrix))
        return matrix

    def decompose(matrix):
        d = get_strategy(basis).decompose(matrix)
        return merge_identity_pairs(d) if args.merge else d

    def to_document(d):
        return ArtifactFactory.terms_to_document(d).model_copy(update={"padded_from": padded_from})

    (
        Pipeline("decompose")
        .add_step(load)
        .add_step(decompose, basis.value)
        .add_step(to_document)
        .add_loader(JsonArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "decompose",
        help="Decompõe uma matriz em strings de Pauli ou Sigma",
        description="Matrizes fora de 2^n x 2^n são completadas com zeros (campo padded_from).",
    )
    parser.add_argument("--matrix", type=Path, required=True, help="Matriz de entrada (JSON)")
    parser.add_argument("--basis", choices=[b.value for b in Basis], required=True, help="Alfabeto")
    parser.add_argument("--merge", action="store_true", help="Funde pares PM/MP em I2 (apenas sigma)")
    parser.add_argument("--out", type=Path, required=True, help="Termos de saída (JSON)")
    parser.set_defaults(handler=handle)
