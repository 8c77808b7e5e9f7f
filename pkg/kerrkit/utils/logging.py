"""
Logging configuration for the library and CLI

Records are JSON objects on stderr; stdout stays free for data. Fields bound
with LogContext (command, run_id, kernel family) are stamped on every record
created inside the block, including records from library modules.
"""

import json
import logging
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict

import numpy as np

# attributes every LogRecord carries; anything else came in through extra=
_STANDARD_ATTRS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {
    "message", "asctime", "taskName", "context", "_log_ctx",
}

_QUIET_LOGGERS = ("httpx", "httpcore", "joblib")

_bound: ContextVar[Dict[str, Any]] = ContextVar("kerrkit_log_context", default={})
_factory_installed = False


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """Custom formatter for structured JSON logging"""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)

        entry.update({k: v for k, v in vars(record).items() if k not in _STANDARD_ATTRS and not k.startswith("_")})

        # bound context first, then per-call context; neither overwrites
        for ctx in (getattr(record, "_log_ctx", None), getattr(record, "context", None)):
            if isinstance(ctx, dict):
                for key, value in ctx.items():
                    entry.setdefault(key, value)

        return json.dumps(entry, default=_json_default)


def _install_record_factory() -> None:
    global _factory_installed
    if _factory_installed:
        return
    base = logging.getLogRecordFactory()

    def factory(*args, **kwargs) -> logging.LogRecord:
        record = base(*args, **kwargs)
        bound = _bound.get()
        if bound:
            record._log_ctx = dict(bound)
        return record

    logging.setLogRecordFactory(factory)
    _factory_installed = True


def setup_logging(log_level: str = "INFO") -> None:
    """Replace root handlers with one JSON handler on stderr"""

    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        level = logging.INFO

    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(StructuredFormatter())
    root.addHandler(handler)

    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    _install_record_factory()


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def log_with_context(logger: logging.Logger, level: str, message: str, **context: Any) -> None:
    """Log one record with extra key/value context"""
    logger.log(logging.getLevelName(level.upper()), message, extra={"context": context} if context else None)


class LogContext:
    """Bind fields to every record created inside the block; blocks nest"""

    def __init__(self, **context: Any):
        self.context = context
        self._token = None

    def __enter__(self) -> "LogContext":
        _install_record_factory()
        self._token = _bound.set({**_bound.get(), **self.context})
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        _bound.reset(self._token)
