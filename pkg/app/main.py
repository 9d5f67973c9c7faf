"""
Ponto de entrada da CLI.

`run(argv)` devolve o código de saída em vez de encerrar o processo:
0 sucesso, 1 erro de validação/entrada, 2 falha de verificação.
"""
import json
import sys
from typing import List, Optional

from app.cli import build_parser
from app.core.config import settings
from app.core.exceptions import (
    EXIT_OK,
    EXIT_VALIDATION,
    BaseAppException,
    ValidationException,
    VerificationFailure,
    handle_exception,
)
from app.core.logging import get_logger, setup_logging

logger = get_logger(__name__)


def _report(exc: BaseAppException) -> None:
    """Diagnóstico em stderr nomeando o campo ou o erro máximo."""
    print(f"erro: {exc.message}", file=sys.stderr)
    if isinstance(exc, ValidationException):
        for field, messages in exc.field_errors.items():
            print(f"  {field}: {'; '.join(messages)}", file=sys.stderr)
    elif isinstance(exc, VerificationFailure):
        print(json.dumps(exc.report, indent=2, default=str), file=sys.stderr)
    elif exc.details:
        print(f"  {json.dumps(exc.details, default=str)}", file=sys.stderr)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Executa um subcomando.

    Args:
        argv: Argumentos sem o nome do programa (padrão: sys.argv[1:])

    Returns:
        Código de saída
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse já imprimiu a ajuda ou o uso
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION

    setup_logging(level=args.log_level, log_file=settings.LOG_FILE, log_json=args.log_json, app_name="carleman")

    try:
        return args.handler(args)
    except BaseAppException as exc:
        _report(exc)
        return exc.exit_code
    except Exception as exc:
        app_exception = handle_exception(exc)
        logger.error(f"Erro não tratado: {app_exception.message}", command=args.command)
        _report(app_exception)
        return app_exception.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
