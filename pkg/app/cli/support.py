"""
Utilitários compartilhados pelos subcomandos da CLI.
"""
import argparse
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from app.core.config import settings
from app.core.exceptions import ValidationException
from app.core.logging import get_logger
from app.core.pipeline import JsonDocumentExtractor
from app.core.validation import MatrixValidator, NumericValidator, ValidationResult
from app.models import ArtifactFactory, MatrixDocument, RunManifest
from app.services.tensorcore import SparseComplexMatrix, next_power_of_two

logger = get_logger(__name__)

# Atributos do Namespace que não fazem parte da configuração resolvida
_INTERNAL_ARGS = {"handler", "command", "probe_command", "log_level", "log_json"}


# ----- tipos de argumento -----

def int_list(text: str) -> List[int]:
    """"2,4,6,8" -> [2, 4, 6, 8]; "1..5" -> [1, 2, 3, 4, 5]."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de inteiros inválida: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"lista vazia: {text!r}")
    return values


def time_span(text: str) -> Tuple[float, float]:
    """"0:1" -> (0.0, 1.0)."""
    try:
        start, end = (float(tok) for tok in text.split(":", 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"intervalo inválido (use t0:t1): {text!r}")
    if end <= start:
        raise argparse.ArgumentTypeError(f"intervalo vazio: {text!r}")
    return start, end


# ----- parâmetros -----

def check_params(*checks: Tuple[NumericValidator, Any]) -> None:
    """
    Valida parâmetros numéricos da linha de comando.

    Raises:
        ValidationException: nomeando o primeiro flag inválido
    """
    result = ValidationResult()
    for validator, value in checks:
        result.merge(validator.validate(value))
    result.raise_if_invalid("Parâmetros inválidos")


def positive_int(flag: str) -> NumericValidator:
    return NumericValidator(flag, min_value=1, is_integer=True)


# ----- manifesto -----

def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def resolved_config(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        key: _jsonable(value)
        for key, value in sorted(vars(args).items())
        if key not in _INTERNAL_ARGS
    }


def new_manifest(
    subcommand: str,
    args: argparse.Namespace,
    inputs: Optional[Dict[str, Any]] = None,
    outputs: Optional[Dict[str, Any]] = None,
    seed: Optional[int] = None,
) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        version=settings.VERSION,
        config=resolved_config(args),
        inputs={k: str(v) for k, v in (inputs or {}).items() if v is not None},
        outputs={k: str(v) for k, v in (outputs or {}).items() if v is not None},
        seed=seed,
    )


# ----- matrizes -----

def read_matrix(path: Path) -> SparseComplexMatrix:
    document = JsonDocumentExtractor(path, MatrixDocument, MatrixValidator()).extract()
    return ArtifactFactory.matrix_from_document(document)


def register_matrix(
    matrix: SparseComplexMatrix, source: str
) -> Tuple[SparseComplexMatrix, Optional[Tuple[int, int]]]:
    """
    Completa com zeros até 2^n x 2^n (n >= 1) quando preciso.

    Returns:
        (matriz pronta, forma original se houve preenchimento)
    """
    if matrix.rows == 0 or matrix.cols == 0:
        raise ValidationException("Matriz vazia", field_errors={"rows/cols": [f"{matrix.rows}x{matrix.cols}"]})
    dim = max(2, next_power_of_two(max(matrix.rows, matrix.cols)))
    if (matrix.rows, matrix.cols) == (dim, dim):
        return matrix, None
    padded = matrix.padded(dim, dim)
    logger.warning(
        "Matriz completada com zeros até potência de dois",
        source=source,
        original=f"{matrix.rows}x{matrix.cols}",
        padded=f"{padded.rows}x{padded.cols}",
    )
    return padded, (matrix.rows, matrix.cols)


def labelled_matrices(paths: Iterable[Path]) -> List[Tuple[str, SparseComplexMatrix]]:
    return [(Path(p).stem, read_matrix(Path(p))) for p in paths]
