"""
Sistema de validação de artefatos.

Fornece interfaces e validadores semânticos aplicados depois do schema pydantic.
"""
from app.core.validation.interface import (
    ValidationIssue,
    ValidationResult,
    ValidationSeverity,
    Validator,
    join_path,
)
from app.core.validation.validators import (
    CircuitValidator,
    MatrixValidator,
    NumericValidator,
    PolynomialSystemValidator,
    TermsValidator,
)

__all__ = [
    "ValidationSeverity",
    "ValidationIssue",
    "ValidationResult",
    "Validator",
    "join_path",
    "NumericValidator",
    "MatrixValidator",
    "PolynomialSystemValidator",
    "TermsValidator",
    "CircuitValidator",
]
