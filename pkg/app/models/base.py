"""
Modelos base para os artefatos da aplicação.

Todo artefato JSON gravado pela CLI herda de `ArtifactBase` e carrega o
`RunManifest` que o produziu.
"""
from datetime import datetime
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

# Configuração base compartilhada por todos os documentos
BASE_CONFIG = ConfigDict(populate_by_name=True, extra="forbid")

# Campos do manifesto que variam entre execuções idênticas
VOLATILE_MANIFEST_FIELDS = {"started_at", "wall_clock_ms"}


class RunManifest(BaseModel):
    """Registro da execução que produziu um artefato."""

    model_config = ConfigDict(
        **BASE_CONFIG,
        json_schema_extra={
            "example": {
                "subcommand": "linearize",
                "version": "0.3.0",
                "config": {"order": 4},
                "inputs": {"system": "sys.json"},
                "outputs": {"out": "matrix.json"},
                "seed": None,
                "started_at": "2024-01-01T00:00:00",
                "wall_clock_ms": 12.5,
            }
        },
    )

    subcommand: str = Field(..., description="Subcomando da CLI")
    version: str = Field(..., description="Versão da ferramenta")
    config: Dict[str, Any] = Field(default_factory=dict, description="Parâmetros resolvidos")
    inputs: Dict[str, str] = Field(default_factory=dict, description="Caminhos de entrada")
    outputs: Dict[str, str] = Field(default_factory=dict, description="Caminhos de saída")
    seed: Optional[int] = Field(None, description="Semente do PRNG, quando usada")
    started_at: datetime = Field(default_factory=datetime.now, description="Início da execução")
    wall_clock_ms: float = Field(0.0, description="Duração da execução")

    def stable_dict(self) -> Dict[str, Any]:
        """Manifesto sem os campos que variam entre execuções."""
        return self.model_dump(mode="json", exclude=VOLATILE_MANIFEST_FIELDS)


class ArtifactBase(BaseModel):
    """Base dos documentos gravados em disco."""

    model_config = BASE_CONFIG

    manifest: Optional[RunManifest] = Field(None, description="Manifesto da execução")
