"""
Sistema centralizado de exceções.

Cada exceção carrega o código de saída que a CLI devolve ao shell:
1 para erros de validação/entrada e 2 para falhas de verificação.
"""
import inspect
import json
from typing import Any, Dict, List, Optional

from pydantic import ValidationError as PydanticValidationError

from app.core.logging import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2


class BaseAppException(Exception):
    """Exceção base para todas as exceções da aplicação."""

    def __init__(
        self,
        message: str = "Erro na aplicação",
        details: Optional[Dict[str, Any]] = None,
        exit_code: int = EXIT_VALIDATION,
        error_code: Optional[str] = None,
        original_exception: Optional[Exception] = None,
    ):
        self.message = message
        self.details = details or {}
        self.exit_code = exit_code
        self.error_code = error_code
        self.original_exception = original_exception
        self.caller_info = self._get_caller_info()

        self._log_exception()

        super().__init__(message)

    def _get_caller_info(self) -> Dict[str, Any]:
        """Primeiro quadro fora dos construtores da hierarquia."""
        for frame in inspect.stack(context=0)[2:]:
            if frame.function != "__init__":
                return {"file": frame.filename, "line": frame.lineno, "function": frame.function}
        return {}

    def _log_exception(self) -> None:
        fields = {
            "error_code": self.error_code,
            "exit_code": self.exit_code,
            "raised_at": f"{self.caller_info.get('file', '?')}:{self.caller_info.get('line', '?')}",
        }
        if self.original_exception is not None:
            fields["cause"] = repr(self.original_exception)
        # falhas de verificação são resultado do comando; as demais ficam em debug
        log = logger.error if self.exit_code == EXIT_VERIFICATION else logger.debug
        log(f"{type(self).__name__}: {self.message}", **fields)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "message": self.message,
            "exit_code": self.exit_code,
        }
        if self.error_code:
            result["error_code"] = self.error_code
        if self.details:
            result["details"] = self.details
        return result


# Exceções de Domínio

class DomainException(BaseAppException):
    """Base para exceções de domínio (entrada inválida para uma operação)."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        error_code: Optional[str] = None,
        original_exception: Optional[Exception] = None,
    ):
        super().__init__(
            message=message,
            details=details,
            exit_code=EXIT_VALIDATION,
            error_code=error_code,
            original_exception=original_exception,
        )


class ValidationException(DomainException):
    """Artefato ou parâmetro inválido; `field_errors` nomeia os campos."""

    def __init__(
        self,
        message: str = "Erro de validação",
        details: Optional[Dict[str, Any]] = None,
        field_errors: Optional[Dict[str, List[str]]] = None,
        error_code: Optional[str] = None,
        original_exception: Optional[Exception] = None,
    ):
        details = details or {}
        if field_errors:
            details["field_errors"] = field_errors
        self.field_errors = field_errors or {}

        super().__init__(
            message=message,
            details=details,
            error_code=error_code or "VALIDATION_ERROR",
            original_exception=original_exception,
        )


class DimensionMismatchError(DomainException):
    """Dimensões incompatíveis entre operandos."""

    def __init__(self, message: str = "Dimensões incompatíveis", **dims: Any):
        super().__init__(message=message, details=dict(dims), error_code="DIMENSION_MISMATCH")


class DimensionOverflowError(DomainException):
    """Dimensão resultante excede o intervalo de índices suportado."""

    def __init__(self, message: str = "Dimensão excede o limite suportado", **dims: Any):
        super().__init__(message=message, details=dict(dims), error_code="DIMENSION_OVERFLOW")


class NonPowerOfTwoError(DomainException):
    """Matriz que deveria agir sobre um registro de qubits não é 2^n x 2^n."""

    def __init__(self, rows: int, cols: int):
        super().__init__(
            message=f"Matriz {rows}x{cols} não é quadrada com dimensão potência de dois",
            details={"rows": rows, "cols": cols},
            error_code="NON_POWER_OF_TWO",
        )


class EmptyDecompositionError(DomainException):
    """Lista de coeficientes vazia ou toda nula."""

    def __init__(self, message: str = "Todos os coeficientes são nulos"):
        super().__init__(message=message, error_code="EMPTY_DECOMPOSITION")


class DivergenceError(DomainException):
    """Integração produziu valores não finitos."""

    def __init__(self, failure_time: float, message: Optional[str] = None):
        self.failure_time = failure_time
        super().__init__(
            message=message or f"Integração divergiu em t={failure_time:.6g}",
            details={"failure_time": failure_time},
            error_code="DIVERGENCE",
        )


class DenseCapExceededError(DomainException):
    """Simulação densa pedida acima do limite de qubits."""

    def __init__(self, qubits: int, cap: int):
        super().__init__(
            message=f"Simulação densa de {qubits} qubits excede o limite de {cap}",
            details={"qubits": qubits, "cap": cap},
            error_code="DENSE_CAP_EXCEEDED",
        )


class VerificationFailure(BaseAppException):
    """Construção verificada não bate com o oráculo dentro da tolerância."""

    def __init__(
        self,
        message: str = "Falha de verificação",
        report: Optional[Dict[str, Any]] = None,
    ):
        self.report = report or {}
        super().__init__(
            message=message,
            details={"report": self.report},
            exit_code=EXIT_VERIFICATION,
            error_code="VERIFICATION_FAILED",
        )


# Exceções de Infraestrutura

class ArtifactIOException(BaseAppException):
    """Erro ao ler ou gravar artefatos JSON/CSV."""

    def __init__(
        self,
        message: str = "Erro de leitura/escrita de artefato",
        path: Optional[str] = None,
        original_exception: Optional[Exception] = None,
    ):
        super().__init__(
            message=message,
            details={"path": path} if path else None,
            exit_code=EXIT_VALIDATION,
            error_code="ARTIFACT_IO_ERROR",
            original_exception=original_exception,
        )


def _pydantic_field_errors(exc: PydanticValidationError) -> Dict[str, List[str]]:
    field_errors: Dict[str, List[str]] = {}
    for error in exc.errors():
        path = ".".join(str(part) for part in error.get("loc", ())) or "<root>"
        field_errors.setdefault(path, []).append(error.get("msg", "inválido"))
    return field_errors


def handle_exception(exception: Exception) -> BaseAppException:
    """
    Converte exceções padrão em exceções da aplicação.

    Args:
        exception: Exceção a ser convertida

    Returns:
        Exceção da aplicação com o código de saída adequado
    """
    if isinstance(exception, BaseAppException):
        return exception

    if isinstance(exception, PydanticValidationError):
        return ValidationException(
            message="Artefato com campos inválidos",
            field_errors=_pydantic_field_errors(exception),
            original_exception=exception,
        )

    if isinstance(exception, json.JSONDecodeError):
        return ValidationException(
            message=f"JSON malformado: {exception.msg} (linha {exception.lineno})",
            original_exception=exception,
        )

    if isinstance(exception, FileNotFoundError):
        return ArtifactIOException(
            message=f"Arquivo não encontrado: {exception}",
            path=getattr(exception, "filename", None),
            original_exception=exception,
        )

    if isinstance(exception, (ValueError, KeyError)):
        return ValidationException(
            message=str(exception) or "Valor inválido",
            original_exception=exception,
        )

    return BaseAppException(
        message=str(exception) or "Erro interno",
        original_exception=exception,
    )
