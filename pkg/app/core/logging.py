"""
Sistema de logging centralizado.

Configura o logging da ferramenta e fornece um logger com campos
estruturados e medição de tempo de operações numéricas longas.
Os logs vão para stderr; stdout fica livre para a saída dos comandos.

Exemplo:
    logger = get_logger(__name__)
    logger.info("Matriz montada", order=4, nnz=7)
    with logger.timing("assemble"):
        ...
"""
import json
import logging
import sys
import time
from datetime import datetime
from typing import Any, Dict, Optional, Union

# atributo do LogRecord que carrega os campos estruturados
FIELDS_ATTR = "fields"


def _record_fields(record: logging.LogRecord) -> Dict[str, Any]:
    return getattr(record, FIELDS_ATTR, None) or {}


class JsonFormatter(logging.Formatter):
    """Um objeto JSON por linha; os campos estruturados ficam no nível raiz."""

    def __init__(self, app_name: str = "carleman"):
        super().__init__()
        self.app_name = app_name

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "app": self.app_name,
            "message": record.getMessage(),
        }
        log_data.update(_record_fields(record))

        if record.exc_info and record.exc_info[0] is not None:
            log_data["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }

        return json.dumps(log_data, default=str)


class KeyValueFormatter(logging.Formatter):
    """Formato de texto com os campos estruturados anexados como `chave=valor`."""

    def __init__(self):
        super().__init__("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        fields = _record_fields(record)
        if not fields:
            return line
        return line + " | " + " ".join(f"{key}={value}" for key, value in fields.items())


def setup_logging(
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
    log_json: bool = False,
    app_name: str = "carleman",
) -> None:
    """
    Configura o logger raiz; chamado uma vez por invocação da CLI.

    Args:
        level: Nível de log (int ou nome)
        log_file: Caminho opcional de arquivo de log
        log_json: Se True, usa `JsonFormatter`
        app_name: Nome incluído nos registros JSON
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    formatter: logging.Formatter = JsonFormatter(app_name) if log_json else KeyValueFormatter()
    handlers: list = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    for handler in handlers:
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)


class AppLogger:
    """
    Logger com campos estruturados.

    `bind(**campos)` devolve um logger que repete esses campos em toda
    mensagem, por exemplo a ordem N dentro de um estudo de convergência.
    """

    def __init__(self, name: str, context: Optional[Dict[str, Any]] = None):
        self.name = name
        self.context: Dict[str, Any] = dict(context or {})
        self._logger = logging.getLogger(name)

    def bind(self, **context: Any) -> "AppLogger":
        return AppLogger(self.name, {**self.context, **context})

    def debug(self, msg: str, **fields: Any) -> None:
        self._log(logging.DEBUG, msg, fields)

    def info(self, msg: str, **fields: Any) -> None:
        self._log(logging.INFO, msg, fields)

    def warning(self, msg: str, **fields: Any) -> None:
        self._log(logging.WARNING, msg, fields)

    def error(self, msg: str, **fields: Any) -> None:
        self._log(logging.ERROR, msg, fields)

    def _log(self, level: int, msg: str, fields: Dict[str, Any]) -> None:
        if self._logger.isEnabledFor(level):
            self._logger.log(level, msg, extra={FIELDS_ATTR: {**self.context, **fields}})

    def timing(self, operation_name: str) -> "TimingContext":
        """Contexto que registra a duração de uma operação."""
        return TimingContext(self, operation_name)


class TimingContext:
    """Mede o tempo de um bloco; `elapsed_ms` fica disponível após a saída."""

    def __init__(self, logger: AppLogger, operation_name: str):
        self.logger = logger
        self.operation_name = operation_name
        self.start_time = 0.0
        self.elapsed_ms = 0.0

    def __enter__(self) -> "TimingContext":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.elapsed_ms = (time.perf_counter() - self.start_time) * 1000.0
        fields = {"operation": self.operation_name, "elapsed_ms": round(self.elapsed_ms, 3)}
        if exc_type:
            self.logger.error(f"'{self.operation_name}' falhou", error=str(exc_val), **fields)
        else:
            self.logger.debug(f"'{self.operation_name}' concluída", **fields)


def get_logger(name: str) -> AppLogger:
    """Obtém um `AppLogger` para o módulo `name`."""
    return AppLogger(name)
