import math

import pytest

from app.core.exceptions import ValidationException
from app.core.validation import (
    CircuitValidator,
    MatrixValidator,
    NumericValidator,
    PolynomialSystemValidator,
    TermsValidator,
    ValidationResult,
    ValidationSeverity,
)
from app.models import CircuitDocument, MatrixBody, SystemDocument, TermsDocument


def _system(**overrides) -> SystemDocument:
    payload = {
        "n": 1,
        "p": 2,
        "time_dependent": False,
        "M": [
            {"k": 1, "matrix": {"rows": 1, "cols": 1, "entries": [[0, 0, -1.0, 0.0]]}},
            {"k": 2, "matrix": {"rows": 1, "cols": 1, "entries": [[0, 0, 0.5, 0.0]]}},
        ],
    }
    payload.update(overrides)
    return SystemDocument.model_validate(payload)


# ----- NumericValidator -----

def test_numeric_validator_bounds():
    validator = NumericValidator("--order", min_value=1, is_integer=True)
    assert validator.validate(3).is_valid
    result = validator.validate(0)
    assert not result.is_valid
    assert "--order" in result.field_errors()


def test_numeric_validator_rejects_non_finite():
    result = NumericValidator("--dt").validate(math.nan)
    assert not result.is_valid


def test_numeric_validator_missing_value():
    assert not NumericValidator("--tol").validate(None).is_valid
    assert NumericValidator("--tol", required=False).validate(None).is_valid


# ----- MatrixValidator -----

def test_matrix_validator_accepts_valid_matrix():
    matrix = MatrixBody(rows=2, cols=2, entries=[(0, 1, 1.0, 0.0), (1, 0, 0.0, -1.0)])
    assert MatrixValidator().validate(matrix).is_valid


def test_matrix_validator_names_bad_entry():
    matrix = MatrixBody(rows=2, cols=2, entries=[(0, 0, 1.0, 0.0), (0, 7, 1.0, 0.0), (0, 0, 2.0, 0.0)])
    errors = MatrixValidator().validate(matrix).field_errors()

    assert "entries[1].col" in errors
    assert "entries[2]" in errors


def test_matrix_validator_warns_on_values_below_zero_tolerance():
    matrix = MatrixBody(rows=2, cols=2, entries=[(0, 0, 1.0, 0.0), (1, 1, 1e-15, 0.0)])
    result = MatrixValidator().validate(matrix)

    assert result.is_valid
    assert result.has_issues(ValidationSeverity.WARNING)
    assert result.field_errors() == {}
    assert [issue.field for issue in result.issues] == ["entries[1].value"]


def test_matrix_validator_checks_expected_shape():
    matrix = MatrixBody(rows=2, cols=2, entries=[])
    errors = MatrixValidator("matrix", shape=(2, 4)).validate(matrix).field_errors()
    assert "matrix.rows/cols" in errors


# ----- PolynomialSystemValidator -----

def test_system_validator_accepts_scalar_quadratic():
    assert PolynomialSystemValidator().validate(_system()).is_valid


def test_system_validator_names_coefficient_shape():
    doc = _system(n=2)
    errors = PolynomialSystemValidator().validate(doc).field_errors()
    assert "M[0].matrix.rows/cols" in errors
    assert "M[1].matrix.rows/cols" in errors


def test_system_validator_rejects_degree_above_p():
    doc = _system(p=1)
    errors = PolynomialSystemValidator().validate(doc).field_errors()
    assert "M[1].k" in errors


def test_system_validator_requires_time_dependent_flag():
    doc = _system()
    doc.M[0].t_power = 1
    errors = PolynomialSystemValidator().validate(doc).field_errors()
    assert "M[0].t_power" in errors


def test_system_validator_checks_initial_state_length():
    doc = _system(initial_state=[[1.0, 0.0], [0.0, 0.0]])
    assert "initial_state" in PolynomialSystemValidator().validate(doc).field_errors()


# ----- TermsValidator -----

def test_terms_validator():
    doc = TermsDocument(
        n=2,
        basis="sigma",
        terms=[
            {"coeff": (1.0, 0.0), "string": "PM,PLUS"},
            {"coeff": (0.0, 0.0), "string": "MP,MP"},
            {"coeff": (1.0, 0.0), "string": "PM,QQ"},
            {"coeff": (2.0, 0.0), "string": "PM,PLUS"},
            {"coeff": (1.0, 0.0), "string": "PM"},
        ],
    )
    errors = TermsValidator().validate(doc).field_errors()

    assert "terms[0].string" not in errors
    assert "terms[1].coeff" in errors
    assert "terms[2].string" in errors
    assert "terms[3].string" in errors
    assert "terms[4].string" in errors


def test_terms_validator_pauli_alphabet():
    doc = TermsDocument(n=2, basis="pauli", terms=[{"coeff": (1.0, 0.0), "string": "XW"}])
    assert "terms[0].string" in TermsValidator().validate(doc).field_errors()


# ----- CircuitValidator -----

def test_circuit_validator():
    doc = CircuitDocument.model_validate({
        "qubits": 2,
        "ancilla": [0, 3],
        "gates": [
            {"kind": "x", "target": 0},
            {"kind": "mcx", "target": 1, "controls": [[1, "open"]]},
            {"kind": "gate", "label": "Z", "target": 5},
            {"kind": "opaque", "qubits": [0], "matrix": [[[1.0, 0.0]]]},
        ],
    })
    errors = CircuitValidator("circuits[0]").validate(doc).field_errors()

    assert "circuits[0].ancilla[1]" in errors
    assert "circuits[0].gates[0]" not in errors
    assert "circuits[0].gates[1]" in errors
    assert "circuits[0].gates[2]" in errors
    assert "circuits[0].gates[3].matrix" in errors


# ----- ValidationResult -----

def test_merge_with_prefix_and_raise():
    inner = ValidationResult()
    inner.error("rows/cols", "forma errada")
    outer = ValidationResult()
    outer.merge(inner, prefix="M[0]")

    assert outer.get_issues_by_field("M[0].rows/cols")
    assert outer.has_issues(ValidationSeverity.ERROR)
    with pytest.raises(ValidationException) as exc_info:
        outer.raise_if_invalid("Sistema inválido")
    assert exc_info.value.field_errors == {"M[0].rows/cols": ["forma errada"]}
    assert exc_info.value.exit_code == 1


def test_to_dict():
    result = ValidationResult()
    result.error("x", "problema", value=3)
    payload = result.to_dict()
    assert payload["is_valid"] is False
    assert payload["total_issues"] == 1
    assert payload["issues"][0]["field"] == "x"
