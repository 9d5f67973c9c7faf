"""
Documentos de circuito.

Cada porta é um objeto com o campo discriminador `kind`:
    {"kind": "x", "target": t}
    {"kind": "gate", "label": "RY", "theta": 0.5, "target": t, "controls": [[q, "closed"]]}
    {"kind": "mcx", "target": t, "controls": [[q, "open"], ...]}
    {"kind": "opaque", "qubits": [...], "matrix": [[[re, im], ...], ...], "label": "PREP"}
"""
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field

from app.models.base import BASE_CONFIG, ArtifactBase
from app.models.terms import TermDocument

ControlRow = Tuple[int, Literal["open", "closed"]]


class XGateDocument(BaseModel):
    model_config = BASE_CONFIG

    kind: Literal["x"] = "x"
    target: int = Field(..., ge=0)


class SingleGateDocument(BaseModel):
    model_config = BASE_CONFIG

    kind: Literal["gate"] = "gate"
    label: Literal["I", "X", "Y", "Z", "H", "RX", "RY"]
    target: int = Field(..., ge=0)
    theta: float = 0.0
    controls: List[ControlRow] = Field(default_factory=list)


class McxGateDocument(BaseModel):
    model_config = BASE_CONFIG

    kind: Literal["mcx"] = "mcx"
    target: int = Field(..., ge=0)
    controls: List[ControlRow] = Field(default_factory=list)


class OpaqueGateDocument(BaseModel):
    model_config = BASE_CONFIG

    kind: Literal["opaque"] = "opaque"
    qubits: List[int] = Field(default_factory=list)
    matrix: List[List[Tuple[float, float]]] = Field(..., description="Matriz densa [re, im]")
    label: str = ""


GateDocument = Annotated[
    Union[XGateDocument, SingleGateDocument, McxGateDocument, OpaqueGateDocument],
    Field(discriminator="kind"),
]


class CircuitDocument(BaseModel):
    """Um circuito sobre `qubits` qubits, com os índices das ancilas."""

    model_config = BASE_CONFIG

    qubits: int = Field(..., ge=0, description="Total de qubits")
    ancilla: List[int] = Field(default_factory=list, description="Índices das ancilas")
    gates: List[GateDocument] = Field(default_factory=list, description="Portas em ordem de aplicação")
    term: Optional[TermDocument] = Field(None, description="Termo de origem, quando houver")
    resources: Dict[str, Any] = Field(default_factory=dict, description="Resumo de recursos")


class CircuitsDocument(ArtifactBase):
    """Um circuito U_j por termo de uma decomposição."""

    n: int = Field(..., ge=1, description="Qubits de sistema")
    basis: Literal["pauli", "sigma"]
    circuits: List[CircuitDocument] = Field(default_factory=list)
