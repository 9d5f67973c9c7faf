"""
Subcomando `termcount`: número de termos Pauli vs Sigma por matriz.
"""
import argparse
from pathlib import Path
from typing import List, Tuple

from app.cli.support import check_params, int_list, labelled_matrices, new_manifest, positive_int
from app.core.exceptions import EXIT_OK, ValidationException
from app.core.logging import get_logger
from app.core.pipeline import CsvArtifactLoader, Pipeline
from app.services.carleman import assemble, bernoulli_system
from app.services.decompose import term_count_study
from app.services.tensorcore import SparseComplexMatrix
from app.utils.data_analysis import StudyTableAnalyzer

logger = get_logger(__name__)


def _carleman_matrices(orders: List[int]) -> List[Tuple[str, SparseComplexMatrix]]:
    system = bernoulli_system()
    return [(f"bernoulli_N{N}", assemble(system, N).matrix) for N in orders]


def _log_summary(table):
    savings = StudyTableAnalyzer.term_savings(table)
    logger.info("Termos economizados pela base Sigma", total=int(savings["difference"].sum()))
    return table


def handle(args: argparse.Namespace) -> int:
    if not args.matrices and not args.carleman_orders:
        raise ValidationException(
            "Informe --matrices e/ou --carleman-orders", field_errors={"--matrices": ["ausente"]}
        )
    check_params(*[(positive_int("--carleman-orders"), n) for n in args.carleman_orders or []])
    inputs = {f"matrices[{i}]": p for i, p in enumerate(args.matrices or [])}
    manifest = new_manifest("termcount", args, inputs=inputs, outputs={"out": args.out})

    def collect():
        return labelled_matrices(args.matrices or []) + _carleman_matrices(args.carleman_orders or [])

    (
        Pipeline("termcount")
        .add_step(collect)
        .add_step(term_count_study, "term_count_study")
        .add_step(_log_summary)
        .add_loader(CsvArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "termcount",
        help="Compara o número de termos Pauli e Sigma",
        description="Colunas: label,dim,nnz,pauli_terms,sigma_terms.",
    )
    parser.add_argument("--matrices", type=Path, nargs="+", help="Matrizes de entrada (JSON)")
    parser.add_argument(
        "--carleman-orders",
        type=int_list,
        default=None,
        help="Inclui as matrizes de Carleman do modelo de Bernoulli nessas ordens, ex.: 1..6",
    )
    parser.add_argument("--out", type=Path, required=True, help="Tabela de saída (CSV)")
    parser.set_defaults(handler=handle)
