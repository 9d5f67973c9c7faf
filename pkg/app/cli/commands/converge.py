"""
Subcomando `converge`: erro máximo do truncamento de Carleman por ordem N.
"""
import argparse
from pathlib import Path

import numpy as np

from app.cli.support import check_params, int_list, new_manifest, positive_int, time_span
from app.core.exceptions import EXIT_OK
from app.core.logging import get_logger
from app.core.pipeline import CsvArtifactLoader, JsonDocumentExtractor, Pipeline
from app.core.validation import NumericValidator, PolynomialSystemValidator
from app.models import ArtifactFactory, SystemDocument
from app.services.carleman import bernoulli_exact, bernoulli_system, convergence_study
from app.utils.data_analysis import StudyTableAnalyzer

logger = get_logger(__name__)


def _study_from_file(args: argparse.Namespace):
    document = JsonDocumentExtractor(args.system, SystemDocument, PolynomialSystemValidator()).extract()
    system = ArtifactFactory.system_from_document(document)
    phi0 = ArtifactFactory.initial_state(document)
    return convergence_study(system, phi0, args.orders, args.tspan, dt=args.dt, samples=args.samples)


def _study_bernoulli(args: argparse.Namespace):
    return convergence_study(
        bernoulli_system(),
        np.array([1.0]),
        args.orders,
        args.tspan,
        reference=bernoulli_exact,
        dt=args.dt,
        samples=args.samples,
    )


def _log_summary(table):
    logger.info("Resumo da convergência", **StudyTableAnalyzer.convergence_summary(table))
    return table


def handle(args: argparse.Namespace) -> int:
    check_params(
        *[(positive_int("--orders"), n) for n in args.orders],
        (NumericValidator("--dt", allow_zero=False, allow_negative=False), args.dt),
        (NumericValidator("--samples", min_value=2, is_integer=True), args.samples),
    )
    manifest = new_manifest("converge", args, inputs={"system": args.system}, outputs={"out": args.out})
    study = _study_bernoulli if args.model == "bernoulli" else _study_from_file

    (
        Pipeline("converge")
        .add_step(lambda: study(args), "convergence_study")
        .add_step(_log_summary)
        .add_loader(CsvArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "converge",
        help="Estudo de convergência do truncamento de Carleman",
        description=(
            "Integra o sistema truncado para cada ordem e compara o primeiro bloco com "
            "uma solução de referência. Colunas: N,D,nnz,max_error,runtime_ms."
        ),
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--system", type=Path, help="Sistema polinomial com initial_state (JSON)")
    source.add_argument(
        "--model",
        choices=["bernoulli"],
        help="Modelo embutido; bernoulli usa a solução fechada 1/(1+t²) como referência",
    )
    parser.add_argument("--orders", type=int_list, default=int_list("1..5"), help="Ordens, ex.: 1..8 ou 1,2,4")
    parser.add_argument("--tspan", type=time_span, default=(0.0, 1.0), help="Horizonte t0:t1")
    parser.add_argument("--dt", type=float, default=1e-3, help="Passo do RK4")
    parser.add_argument("--samples", type=int, default=101, help="Pontos da grade de comparação")
    parser.add_argument("--out", type=Path, required=True, help="Tabela de saída (CSV)")
    parser.set_defaults(handler=handle)
