"""
Documentos de matriz e de sistema polinomial.
"""
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, Field

from app.models.base import BASE_CONFIG, ArtifactBase

# [linha, coluna, parte real, parte imaginária]
EntryRow = Tuple[int, int, float, float]


class MatrixBody(BaseModel):
    """Matriz esparsa em lista de coordenadas."""

    model_config = BASE_CONFIG

    rows: int = Field(..., ge=0, description="Número de linhas")
    cols: int = Field(..., ge=0, description="Número de colunas")
    entries: List[EntryRow] = Field(default_factory=list, description="Entradas [r, c, re, im]")


class MatrixDocument(MatrixBody, ArtifactBase):
    """Matriz gravada em disco, com metadados opcionais (ex.: ordem de Carleman)."""

    meta: Dict[str, Any] = Field(default_factory=dict, description="Metadados da origem")


class CoefficientDocument(BaseModel):
    """Termo t^q · C_{k,q} do coeficiente M_k."""

    model_config = BASE_CONFIG

    k: int = Field(..., ge=0, description="Grau do monômio")
    matrix: MatrixBody = Field(..., description="Matriz n x n^k")
    t_power: int = Field(0, ge=0, description="Potência de t que multiplica a matriz")


class SystemDocument(ArtifactBase):
    """
    Sistema polinomial dΦ/dt = Σ_k M_k(t) Φ^{⊗k}.

    Example:
        {"n": 1, "p": 2, "time_dependent": true,
         "M": [{"k": 1, "t_power": 1, "matrix": {...}}, ...]}
    """

    n: int = Field(..., ge=1, description="Dimensão do estado")
    p: int = Field(..., ge=1, description="Grau polinomial")
    M: List[CoefficientDocument] = Field(default_factory=list, description="Coeficientes")
    time_dependent: bool = Field(False, description="Se algum coeficiente depende de t")
    initial_state: List[Tuple[float, float]] = Field(
        default_factory=list, description="Φ(0) como pares [re, im]"
    )
