"""
Subcomando `probe`: experimentos de barren plateau (`train` e `varscan`).
"""
import argparse
from pathlib import Path

from app.cli.support import check_params, int_list, new_manifest, positive_int
from app.core.config import settings
from app.core.exceptions import EXIT_OK
from app.core.logging import get_logger
from app.core.pipeline import CsvArtifactLoader, Pipeline
from app.core.validation import NumericValidator
from app.services.vqprobe import Ansatz, CostKind, CostSpec, InitStrategy, train, variance_scan
from app.utils.data_analysis import StudyTableAnalyzer

logger = get_logger(__name__)


def _trace_frame(result):
    logger.info("Tendência do custo", trend=StudyTableAnalyzer.trace_trend(result.trace))
    return result.to_frame()


def handle_train(args: argparse.Namespace) -> int:
    check_params(
        (positive_int("--qubits"), args.qubits),
        (positive_int("--layers"), args.layers),
        (NumericValidator("--lr", allow_negative=False), args.lr),
        (NumericValidator("--iters", min_value=0, is_integer=True), args.iters),
    )
    manifest = new_manifest("probe train", args, outputs={"out": args.out}, seed=args.seed)
    ansatz = Ansatz(args.qubits, args.layers)
    cost = CostSpec(CostKind(args.cost))
    init = InitStrategy(args.init)

    (
        Pipeline("probe.train")
        .add_step(lambda: train(ansatz, cost, args.lr, args.iters, seed=args.seed, init=init), "train")
        .add_step(_trace_frame)
        .add_loader(CsvArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def handle_varscan(args: argparse.Namespace) -> int:
    check_params(
        *[(positive_int("--qubits"), n) for n in args.qubits],
        (positive_int("--layers"), args.layers),
        (NumericValidator("--samples", min_value=100, is_integer=True), args.samples),
    )
    manifest = new_manifest("probe varscan", args, outputs={"out": args.out}, seed=args.seed)

    (
        Pipeline("probe.varscan")
        .add_step(
            lambda: variance_scan(args.qubits, args.layers, samples=args.samples, seed=args.seed),
            "variance_scan",
        )
        .add_step(lambda table: table[["n", "kind", "variance"]])
        .add_loader(CsvArtifactLoader(args.out, manifest))
        .execute()
    )
    return EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "probe",
        help="Experimentos de barren plateau com custos global e local",
        description="Simulação exata (sem ruído de amostragem) de um ansatz RY/RX com anel de CZ.",
    )
    probe_commands = parser.add_subparsers(dest="probe_command", metavar="{train,varscan}")
    probe_commands.required = True

    train_parser = probe_commands.add_parser(
        "train", help="Descida de gradiente; colunas iter,cost"
    )
    train_parser.add_argument("--cost", choices=[k.value for k in CostKind], required=True, help="Custo")
    train_parser.add_argument("--qubits", type=int, default=6, help="Número de qubits")
    train_parser.add_argument("--layers", type=int, default=6, help="Número de camadas")
    train_parser.add_argument("--lr", type=float, default=0.1, help="Taxa de aprendizado β")
    train_parser.add_argument("--iters", type=int, default=200, help="Iterações")
    train_parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Semente do PRNG")
    train_parser.add_argument(
        "--init",
        choices=[s.value for s in InitStrategy],
        default=InitStrategy.PLATEAU.value,
        help="θ inicial: plateau (1ª camada perto de π, demais em zero) ou uniform em [0, 2π)",
    )
    train_parser.add_argument("--out", type=Path, required=True, help="Traço de saída (CSV)")
    train_parser.set_defaults(handler=handle_train)

    scan_parser = probe_commands.add_parser(
        "varscan", help="Variância de ∂C/∂θ_1 por n; colunas n,kind,variance"
    )
    scan_parser.add_argument("--qubits", type=int_list, default=int_list("2,4,6,8"), help="Lista de n")
    scan_parser.add_argument("--layers", type=int, default=6, help="Número de camadas")
    scan_parser.add_argument("--samples", type=int, default=settings.VARSCAN_SAMPLES, help="Amostras de θ")
    scan_parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Semente do PRNG")
    scan_parser.add_argument("--out", type=Path, required=True, help="Tabela de saída (CSV)")
    scan_parser.set_defaults(handler=handle_varscan)
