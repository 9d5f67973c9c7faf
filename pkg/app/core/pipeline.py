"""
Pipeline de artefatos (Extract, Transform, Load).

Cada subcomando da CLI é um pipeline: extrai um documento JSON validado,
aplica os passos de domínio e grava o artefato (JSON ou CSV) junto com o
manifesto da execução.
"""
import json
from abc import ABC, abstractmethod
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Generic, List, Optional, Tuple, Type, TypeVar, Union

import pandas as pd
from pydantic import BaseModel

from app.core.exceptions import ArtifactIOException, handle_exception
from app.core.logging import get_logger
from app.core.validation import Validator
from app.models.base import ArtifactBase, RunManifest
from app.models.factory import ModelFactory

# Tipos genéricos para os dados
T = TypeVar('T')  # Tipo de entrada
U = TypeVar('U')  # Tipo de saída
M = TypeVar('M', bound=BaseModel)

PathLike = Union[str, Path]

logger = get_logger(__name__)

# ----- INTERFACES BASE DO PIPELINE -----

class Extractor(Generic[T], ABC):
    """Interface para extrair dados de uma fonte."""

    @abstractmethod
    def extract(self) -> T:
        pass


class Transformer(Generic[T, U], ABC):
    """Interface para transformar dados de um tipo para outro."""

    @abstractmethod
    def transform(self, data: T) -> U:
        pass


class Loader(Generic[T], ABC):
    """Interface para gravar dados em um destino."""

    @abstractmethod
    def load(self, data: T) -> Any:
        pass

# ----- IMPLEMENTAÇÃO DO PIPELINE -----

class Pipeline:
    """
    Encadeia extração, transformações e gravação.

    O primeiro passo não recebe argumentos; cada passo seguinte recebe o
    resultado do anterior.

    Example:
        >>> Pipeline("decompose").add_extractor(src).add_step(fn, "pauli").add_loader(dst).execute()
    """

    def __init__(self, name: str = "pipeline"):
        self.name = name
        self.steps: List[Tuple[Optional[str], Callable[..., Any]]] = []
        self.logger = get_logger(f"pipeline.{name}")

    def add_extractor(self, extractor: Extractor) -> 'Pipeline':
        self.steps.append((type(extractor).__name__, extractor.extract))
        return self

    def add_transformer(self, transformer: Transformer) -> 'Pipeline':
        self.steps.append((type(transformer).__name__, transformer.transform))
        return self

    def add_loader(self, loader: Loader) -> 'Pipeline':
        self.steps.append((type(loader).__name__, loader.load))
        return self

    def add_step(self, step: Callable[..., Any], name: Optional[str] = None) -> 'Pipeline':
        """
        Adiciona um passo genérico ao pipeline.

        Args:
            step: Função que processa os dados (sem argumentos se for o primeiro passo)
            name: Nome do passo; passos nomeados têm a duração registrada
        """
        self.steps.append((name, step))
        return self

    def _run_step(self, index: int, name: Optional[str], step: Callable[..., Any], data: Any) -> Any:
        args = () if index == 0 else (data,)
        if name is None:
            return step(*args)
        with self.logger.timing(name):
            return step(*args)

    def execute(self) -> Any:
        """
        Executa o pipeline completo.

        Raises:
            BaseAppException: erros são convertidos por `handle_exception`
        """
        if not self.steps:
            self.logger.warning("Pipeline vazio, nada a executar")
            return None

        self.logger.info(f"Iniciando pipeline '{self.name}'", steps=len(self.steps))
        data = None
        with self.logger.timing(self.name):
            for index, (name, step) in enumerate(self.steps):
                try:
                    data = self._run_step(index, name, step, data)
                except Exception as e:
                    self.logger.debug("Passo falhou", step=name or index, error=str(e))
                    raise handle_exception(e) from e
        return data

# ----- EXTRATORES -----

class JsonDocumentExtractor(Extractor[M]):
    """
    Lê um arquivo JSON e o valida contra um documento pydantic.

    Com `validator`, as regras semânticas são aplicadas em seguida e o
    primeiro problema vira `ValidationException` com o caminho do campo.
    """

    def __init__(
        self,
        file_path: PathLike,
        model_class: Type[M],
        validator: Optional[Validator[M]] = None,
    ):
        self.file_path = Path(file_path)
        self.factory = ModelFactory(model_class)
        self.validator = validator
        self.logger = get_logger(f"extractor.json.{self.file_path.name}")

    def extract(self) -> M:
        self.logger.debug(f"Lendo artefato {self.file_path}")
        try:
            with open(self.file_path, 'r', encoding='utf-8') as f:
                raw = json.load(f)
        except OSError as e:
            raise ArtifactIOException(
                f"Não foi possível ler {self.file_path}", path=str(self.file_path), original_exception=e
            ) from e
        except json.JSONDecodeError as e:
            raise handle_exception(e) from e

        document = self.factory.create_from_dict(raw)
        if self.validator is not None:
            result = self.validator.validate(document)
            for issue in result.issues:
                if not issue.severity.blocking:
                    self.logger.warning(issue.message, field=issue.field)
            result.raise_if_invalid(f"Artefato inválido: {self.file_path}")
        return document

# ----- LOADERS -----

def _stamp(manifest: Optional[RunManifest]) -> Optional[RunManifest]:
    if manifest is None:
        return None
    elapsed = (datetime.now() - manifest.started_at).total_seconds() * 1000.0
    return manifest.model_copy(update={"wall_clock_ms": elapsed})


def manifest_sidecar(path: PathLike) -> Path:
    """Caminho do manifesto gravado ao lado de um CSV."""
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


class JsonArtifactLoader(Loader[ArtifactBase]):
    """Grava um documento com o manifesto embutido, chaves na ordem dos campos."""

    def __init__(self, file_path: PathLike, manifest: Optional[RunManifest] = None, indent: int = 2):
        self.file_path = Path(file_path)
        self.manifest = manifest
        self.indent = indent
        self.logger = get_logger(f"loader.json.{self.file_path.name}")

    def load(self, data: ArtifactBase) -> ArtifactBase:
        if self.manifest is not None:
            data = data.model_copy(update={"manifest": _stamp(self.manifest)})
        try:
            self.file_path.parent.mkdir(parents=True, exist_ok=True)
            self.file_path.write_text(
                data.model_dump_json(by_alias=True, indent=self.indent) + "\n", encoding="utf-8"
            )
        except OSError as e:
            raise ArtifactIOException(
                f"Não foi possível gravar {self.file_path}", path=str(self.file_path), original_exception=e
            ) from e
        self.logger.info(f"Artefato gravado em {self.file_path}")
        return data


class CsvArtifactLoader(Loader[pd.DataFrame]):
    """
    Grava um DataFrame em CSV (cabeçalho, sem índice, ponto decimal) e o
    manifesto em `<arquivo>.manifest.json`.
    """

    def __init__(
        self,
        file_path: PathLike,
        manifest: Optional[RunManifest] = None,
        float_format: str = "%.12g",
    ):
        self.file_path = Path(file_path)
        self.manifest = manifest
        self.float_format = float_format
        self.logger = get_logger(f"loader.csv.{self.file_path.name}")

    def load(self, data: pd.DataFrame) -> pd.DataFrame:
        try:
            self.file_path.parent.mkdir(parents=True, exist_ok=True)
            data.to_csv(self.file_path, index=False, float_format=self.float_format, lineterminator="\n")
            if self.manifest is not None:
                manifest_sidecar(self.file_path).write_text(
                    _stamp(self.manifest).model_dump_json(indent=2) + "\n", encoding="utf-8"
                )
        except OSError as e:
            raise ArtifactIOException(
                f"Não foi possível gravar {self.file_path}", path=str(self.file_path), original_exception=e
            ) from e
        self.logger.info(f"Tabela gravada em {self.file_path}", rows=len(data))
        return data
