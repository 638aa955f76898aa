from ragstack.observability.logs import JsonLogger
from ragstack.observability.metrics import MetricsRegistry
from ragstack.observability.tracing import (
    FileExporter,
    InMemoryExporter,
    OtlpHttpExporter,
    SpanExporter,
    TraceContext,
    Tracer,
    current_context,
    extract,
    propagate,
)

__all__ = [
    "FileExporter",
    "InMemoryExporter",
    "JsonLogger",
    "MetricsRegistry",
    "OtlpHttpExporter",
    "SpanExporter",
    "TraceContext",
    "Tracer",
    "current_context",
    "extract",
    "propagate",
]


def telemetry_from_env(service: str, env=None):
    """TELEMETRY_MODE={otlp|file|off}; returns (tracer, metrics, logger)."""
    import os

    env = dict(os.environ if env is None else env)
    mode = env.get("TELEMETRY_MODE", "off")
    exporter = None
    if mode == "file":
        exporter = FileExporter(env.get("TELEMETRY_DIR", "./data/telemetry"))
    elif mode == "otlp":
        exporter = OtlpHttpExporter(env["OTEL_EXPORT_ENDPOINT"])
    return Tracer(service, exporter), MetricsRegistry(), JsonLogger(service)
