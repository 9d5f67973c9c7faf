"""
Interfaces do sistema de validação.

Um `Validator` recebe um documento (ou parâmetro da CLI) e devolve um
`ValidationResult` com os problemas encontrados. Cada problema carrega o
caminho completo do campo, no formato `M[1].matrix.entries[3].row`, para que
a mensagem de erro aponte exatamente o que corrigir no JSON de entrada.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Generic, List, Optional, TypeVar

from app.core.exceptions import ValidationException

T = TypeVar('T')


class ValidationSeverity(Enum):
    """
    Níveis de severidade.

    WARNING não invalida o artefato; ERROR e CRITICAL invalidam.
    """
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"

    @property
    def blocking(self) -> bool:
        return self in (ValidationSeverity.ERROR, ValidationSeverity.CRITICAL)


def join_path(prefix: str, suffix: str) -> str:
    """`join_path("M[0]", "matrix.rows")` -> `"M[0].matrix.rows"`; partes vazias somem."""
    if not prefix:
        return suffix
    if not suffix:
        return prefix
    return f"{prefix}.{suffix}"


@dataclass(frozen=True)
class ValidationIssue:
    field: str
    message: str
    severity: ValidationSeverity = ValidationSeverity.ERROR
    value: Any = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def code(self) -> str:
        """Código estável: severidade + último segmento do caminho sem índices."""
        leaf = self.field.rsplit(".", 1)[-1].split("[", 1)[0] or "root"
        return f"{self.severity.value.upper()}:{leaf}"

    def prefixed(self, prefix: str) -> "ValidationIssue":
        return replace(self, field=join_path(prefix, self.field))

    def __str__(self) -> str:
        return f"{self.severity.value.upper()}: {self.field} - {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "field": self.field,
            "message": self.message,
            "severity": self.severity.value,
            "code": self.code,
        }
        if self.value is not None:
            result["value"] = self.value
        if self.details:
            result["details"] = self.details
        return result


@dataclass
class ValidationResult:
    """Problemas acumulados, na ordem em que foram encontrados."""
    issues: List[ValidationIssue] = field(default_factory=list)

    def add_issue(self, issue: ValidationIssue) -> None:
        self.issues.append(issue)

    def error(self, field: str, message: str, value: Any = None, **details: Any) -> None:
        self.add_issue(ValidationIssue(field, message, ValidationSeverity.ERROR, value, details))

    def warn(self, field: str, message: str, value: Any = None, **details: Any) -> None:
        self.add_issue(ValidationIssue(field, message, ValidationSeverity.WARNING, value, details))

    def require(self, value: Any, field: str, required: bool = True) -> bool:
        """
        Registra a ausência de um valor obrigatório.

        Returns:
            True se há valor a validar
        """
        if value is not None:
            return True
        if required:
            self.error(field, "Campo obrigatório não fornecido")
        return False

    def has_issues(self, severity: Optional[ValidationSeverity] = None) -> bool:
        if severity is None:
            return bool(self.issues)
        return any(issue.severity == severity for issue in self.issues)

    def get_issues_by_field(self, field: str) -> List[ValidationIssue]:
        return [issue for issue in self.issues if issue.field == field]

    @property
    def is_valid(self) -> bool:
        return not any(issue.severity.blocking for issue in self.issues)

    def merge(self, other: "ValidationResult", prefix: str = "") -> None:
        """Importa os problemas de `other`, com `prefix` antes de cada caminho."""
        self.issues.extend(issue.prefixed(prefix) for issue in other.issues)

    def field_errors(self) -> Dict[str, List[str]]:
        errors: Dict[str, List[str]] = {}
        for issue in self.issues:
            if issue.severity.blocking:
                errors.setdefault(issue.field, []).append(issue.message)
        return errors

    def raise_if_invalid(self, message: str = "Artefato inválido") -> None:
        if not self.is_valid:
            raise ValidationException(message=message, field_errors=self.field_errors())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_valid": self.is_valid,
            "total_issues": len(self.issues),
            "issues": [issue.to_dict() for issue in self.issues],
        }


class Validator(Generic[T], ABC):
    """Interface base para validadores de documentos e parâmetros."""

    @abstractmethod
    def validate(self, data: T) -> ValidationResult:
        """Valida `data` sem lançar exceções; o chamador decide o que fazer."""
