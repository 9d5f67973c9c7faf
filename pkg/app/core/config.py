"""
Configuração central da aplicação.

Os valores vêm dos defaults abaixo, de um arquivo `.env` (carregado com
python-dotenv) e das variáveis de ambiente com prefixo `CARLEMAN_`.
"""
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CARLEMAN_", extra="ignore")

    PROJECT_NAME: str = "Carleman Sigma-LCU Toolkit"
    VERSION: str = "0.3.0"

    # Tolerâncias numéricas
    ZERO_TOL: float = 1e-12
    UNITARY_TOL: float = 1e-10

    # Limites de escala
    DENSE_QUBIT_CAP: int = 12
    MAX_DIMENSION: int = 2 ** 24

    # Integração
    DEFAULT_DT: float = 1e-3
    REFERENCE_RTOL: float = 1e-11
    REFERENCE_ATOL: float = 1e-13

    # Experimentos variacionais
    DEFAULT_SEED: int = 2024
    VARSCAN_SAMPLES: int = 500

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False
    LOG_FILE: Optional[str] = None


settings = Settings()
