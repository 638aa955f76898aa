"""Tracing: request-scoped contexts, span tree recording, W3C propagation.

Telemetry must never fail the request path: export errors are counted and
dropped, malformed inbound headers start a fresh root trace.
"""

from __future__ import annotations

import contextvars
import json
import os
import re
import secrets
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional

_TRACEPARENT_RE = re.compile(r"^00-([0-9a-f]{32})-([0-9a-f]{16})-([0-9a-f]{2})$")

_current_context: contextvars.ContextVar[Optional["TraceContext"]] = (
    contextvars.ContextVar("trace_context", default=None)
)


@dataclass(frozen=True)
class TraceContext:
    trace_id: str  # 32 hex chars (128-bit)
    span_id: str  # 16 hex chars (64-bit)
    parent_span_id: Optional[str] = None
    sampled: bool = True

    @classmethod
    def new_root(cls, sampled: bool = True) -> "TraceContext":
        return cls(secrets.token_hex(16), secrets.token_hex(8), None, sampled)

    def child(self) -> "TraceContext":
        return TraceContext(self.trace_id, secrets.token_hex(8), self.span_id,
                            self.sampled)


def current_context() -> Optional[TraceContext]:
    return _current_context.get()


def propagate(ctx: TraceContext) -> dict[str, str]:
    flags = "01" if ctx.sampled else "00"
    return {"traceparent": f"00-{ctx.trace_id}-{ctx.span_id}-{flags}"}


def extract(headers: dict[str, str]) -> Optional[TraceContext]:
    """Parse a traceparent header; None on absence or malformation (the
    caller then starts a new root trace)."""
    raw = headers.get("traceparent") or headers.get("Traceparent") or ""
    m = _TRACEPARENT_RE.match(raw.strip())
    if not m:
        return None
    trace_id, span_id, flags = m.groups()
    if trace_id == "0" * 32 or span_id == "0" * 16:
        return None
    return TraceContext(trace_id, span_id, None, sampled=flags != "00")


class SpanExporter:
    def export(self, span: dict[str, Any]) -> None:  # pragma: no cover - interface
        raise NotImplementedError


class InMemoryExporter(SpanExporter):
    def __init__(self):
        self.spans: list[dict[str, Any]] = []
        self._lock = threading.Lock()

    def export(self, span: dict[str, Any]) -> None:
        with self._lock:
            self.spans.append(span)

    def clear(self) -> None:
        with self._lock:
            self.spans.clear()


class FileExporter(SpanExporter):
    def __init__(self, directory: str):
        os.makedirs(directory, exist_ok=True)
        self.path = os.path.join(directory, "spans.jsonl")
        self._lock = threading.Lock()

    def export(self, span: dict[str, Any]) -> None:
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(span) + "\n")


class OtlpHttpExporter(SpanExporter):
    """Thin OTLP/HTTP-style JSON push; a real collector adapter slots in here."""

    def __init__(self, endpoint: str, post: Optional[Callable] = None):
        import httpx

        self.endpoint = endpoint
        self._post = post or httpx.post

    def export(self, span: dict[str, Any]) -> None:
        self._post(self.endpoint, json={"spans": [span]}, timeout=2.0)


class Tracer:
    def __init__(self, service: str, exporter: Optional[SpanExporter] = None):
        self.service = service
        self.exporter = exporter
        self.export_errors = 0
        self.malformed_headers = 0

    @contextmanager
    def start_span(self, name: str, parent: Optional[TraceContext] = None,
                   service: Optional[str] = None) -> Iterator[TraceContext]:
        parent = parent if parent is not None else current_context()
        ctx = parent.child() if parent else TraceContext.new_root()
        token = _current_context.set(ctx)
        started = time.time()
        status = "ok"
        try:
            yield ctx
        except BaseException:
            status = "error"
            raise
        finally:
            _current_context.reset(token)
            self._export({
                "name": name,
                "service": service or self.service,
                "trace_id": ctx.trace_id,
                "span_id": ctx.span_id,
                "parent_span_id": ctx.parent_span_id,
                "sampled": ctx.sampled,
                "start_time": started,
                "duration_ms": (time.time() - started) * 1000,
                "status": status,
            })

    def extract_or_root(self, headers: dict[str, str]) -> Optional[TraceContext]:
        ctx = extract(headers)
        if ctx is None and any(k.lower() == "traceparent" for k in headers):
            self.malformed_headers += 1
        return ctx

    def _export(self, span: dict[str, Any]) -> None:
        if self.exporter is None or not span["sampled"]:
            return
        try:
            self.exporter.export(span)
        except Exception:
            self.export_errors += 1  # telemetry never fails the request
