"""
Subcomando `linearize`: sistema polinomial -> matriz de Carleman truncada.
"""
import argparse
from pathlib import Path
from typing import Optional

from app.cli.support import check_params, new_manifest, positive_int
from app.core.exceptions import EXIT_OK
from app.core.pipeline import JsonArtifactLoader, JsonDocumentExtractor, Pipeline
from app.core.validation import PolynomialSystemValidator
from app.models import ArtifactFactory, MatrixDocument, SystemDocument
from app.services.carleman import CarlemanSystem, PolynomialSystem, assemble


def _freeze(system: PolynomialSystem, time: Optional[float]) -> PolynomialSystem:
    if not system.time_dependent:
        return system
    return system.at(system.reference_time if time is None else time)


def _to_document(carleman: CarlemanSystem, time: Optional[float]) -> MatrixDocument:
    meta = {
        "order": carleman.order,
        "n": carleman.n,
        "dimension": carleman.dimension,
        "offsets": list(carleman.offsets),
        "forcing": [[float(v.real), float(v.imag)] for v in carleman.forcing[: carleman.n]],
    }
    if time is not None:
        meta["time"] = time
    return ArtifactFactory.matrix_to_document(carleman.matrix, meta)


def handle(args: argparse.Namespace) -> int:
    check_params((positive_int("--order"), args.order))
    manifest = new_manifest("linearize", args, inputs={"system": args.system}, outputs={"out": args.out})

    (
        Pipeline("linearize")
        .add_extractor(JsonDocumentExtractor(args.system, SystemDocument, PolynomialSystemValidator()))
        .add_step(ArtifactFactory.system_from_document, "system")
        .add_step(lambda system: _freeze(system, args.time), "freeze")
        .add_step(lambda system: assemble(system, args.order), "assemble")
        .add_step(lambda carleman: _to_document(carleman, args.time))
        .add_loader(JsonArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "linearize",
        help="Monta a matriz de Carleman truncada de um sistema polinomial",
        description="Lê um sistema JSON e grava a matriz de Carleman de ordem N.",
    )
    parser.add_argument("--system", type=Path, required=True, help="Sistema polinomial (JSON)")
    parser.add_argument("--order", type=int, required=True, help="Ordem de truncamento N >= 1")
    parser.add_argument("--out", type=Path, required=True, help="Matriz de saída (JSON)")
    parser.add_argument(
        "--time",
        type=float,
        default=None,
        help="Instante em que coeficientes dependentes de t são avaliados (padrão: tempo de referência)",
    )
    parser.set_defaults(handler=handle)
