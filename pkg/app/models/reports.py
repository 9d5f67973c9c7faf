"""
Relatórios de verificação e documento de block encoding.
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from app.models.base import BASE_CONFIG, ArtifactBase
from app.models.circuit import CircuitDocument


class BlockReport(BaseModel):
    """Resultado da comparação do bloco extraído com H/λ."""

    model_config = BASE_CONFIG

    lambda_: float = Field(..., alias="lambda", description="λ = Σ|α_j|")
    max_block_error: float = Field(..., description="max |bloco − H/λ|")
    qubits: int = Field(..., description="Total de qubits do circuito")
    gate_count: int = Field(..., description="Número de portas")
    resources: Dict[str, Any] = Field(default_factory=dict)


class EncodingDocument(ArtifactBase):
    basis: Literal["pauli", "sigma"]
    lambda_: float = Field(..., alias="lambda")
    selection: List[int] = Field(default_factory=list)
    completion: Optional[int] = None
    fanout: List[int] = Field(default_factory=list)
    system: List[int] = Field(default_factory=list)
    circuit: CircuitDocument
    verification: Optional[BlockReport] = None


class CircuitCheck(BaseModel):
    model_config = BASE_CONFIG

    index: int
    string: str
    max_error: float


class VerifyReport(ArtifactBase):
    """Verificação circuito a circuito contra os termos de origem."""

    tolerance: float
    max_error: float
    passed: bool
    checks: List[CircuitCheck] = Field(default_factory=list)
