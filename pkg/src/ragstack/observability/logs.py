"""Structured JSON-lines logging correlated with the active trace."""

from __future__ import annotations

import json
import sys
import threading
import time
from typing import Any, Callable, Optional, TextIO

from ragstack.observability.tracing import TraceContext, current_context


class JsonLogger:
    def __init__(self, service: str, stream: Optional[TextIO] = None,
                 sink: Optional[Callable[[dict[str, Any]], None]] = None):
        self.service = service
        self._stream = stream if stream is not None else sys.stderr
        self._sink = sink
        self._lock = threading.Lock()
        self.write_errors = 0

    def emit_log(self, level: str, message: str,
                 fields: Optional[dict[str, Any]] = None,
                 ctx: Optional[TraceContext] = None) -> None:
        ctx = ctx or current_context()
        line = {
            "timestamp": time.time(),
            "level": level,
            "service": self.service,
            "message": message,
        }
        if fields:
            line.update(fields)
        if ctx is not None:
            line["trace_id"] = ctx.trace_id
            line["span_id"] = ctx.span_id
        try:
            if self._sink is not None:
                self._sink(line)
            else:
                with self._lock:
                    self._stream.write(json.dumps(line, default=str) + "\n")
        except Exception:
            self.write_errors += 1  # logging never fails the request

    def info(self, message: str, **fields: Any) -> None:
        self.emit_log("info", message, fields or None)

    def warning(self, message: str, **fields: Any) -> None:
        self.emit_log("warning", message, fields or None)

    def error(self, message: str, **fields: Any) -> None:
        self.emit_log("error", message, fields or None)
