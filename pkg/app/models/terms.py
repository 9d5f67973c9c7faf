"""
Documento de decomposição em termos (Pauli ou Sigma).
"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from app.models.base import BASE_CONFIG, ArtifactBase


class TermDocument(BaseModel):
    model_config = BASE_CONFIG

    coeff: Tuple[float, float] = Field(..., description="Coeficiente [re, im]")
    string: str = Field(..., description='String de operadores ("IXZ" ou "PM,PLUS,I2")')


class TermsDocument(ArtifactBase):
    """Lista de termos α_j · string_j sobre um único alfabeto."""

    n: int = Field(..., ge=1, description="Número de qubits")
    basis: Literal["pauli", "sigma"] = Field(..., description="Alfabeto")
    terms: List[TermDocument] = Field(default_factory=list, description="Termos")
    padded_from: Optional[Tuple[int, int]] = Field(None, description="Forma original antes do preenchimento")
