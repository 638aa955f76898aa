"""Public REST boundary: one gateway process fronting all services.

Every request gets a root span (inbound traceparent honored), bearer auth
is enforced on everything except /healthz, /readyz and login, and every
non-2xx body is an ApiError with a stable code.
"""

from __future__ import annotations

import base64
import json
import time
from typing import Optional

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field
from starlette.middleware.base import BaseHTTPMiddleware

from ragstack.auth import AuthService, authorize_read
from ragstack.chain import Chain, QueryRequest
from ragstack.core import AccessPolicy, Principal
from ragstack.core.schemas import ALL_SCHEMAS
from ragstack.errors import Forbidden, NotFound, RagError, Unauthorized
from ragstack.loader import IngestRequest, Ingestor
from ragstack.model_gateway import ModelClient
from ragstack.observability import JsonLogger, MetricsRegistry, Tracer

STREAM_WORDS_PER_FRAME = 4

ERROR_CODES = {
    "unauthorized", "forbidden", "not_found", "validation_error",
    "dependency_unavailable", "internal_error", "invalid_credentials",
    "account_disabled", "source_unreachable", "parse_error",
    "unsupported_format", "embedding_unavailable", "model_unavailable",
    "context_too_long", "empty_document", "empty_input", "decode_error",
    "schema_violation", "storage_unavailable", "quota_exceeded",
    "retrieval_failed", "generation_failed", "unknown_template",
    "judge_unavailable",
    "dimension_mismatch", "zero_vector", "non_finite_entry",
}


class LoginBody(BaseModel):
    user_id: str
    secret: str


class AclBody(BaseModel):
    allowed_groups: list[str] = Field(default_factory=list)
    allowed_users: list[str] = Field(default_factory=list)
    public: bool = False

    def to_policy(self) -> AccessPolicy:
        return AccessPolicy(frozenset(self.allowed_groups),
                            frozenset(self.allowed_users), self.public)


class IngestBody(BaseModel):
    source_uri: str
    acl: AclBody
    declared_format: str = "auto"
    doc_id: Optional[str] = None
    title: Optional[str] = None
    content_base64: Optional[str] = None  # inline upload from the CLI


class QueryBody(BaseModel):
    query: str = Field(min_length=1)
    conversation_id: Optional[str] = None
    k: Optional[int] = Field(default=None, ge=1, le=100)


class UserBody(BaseModel):
    user_id: str
    secret: str
    groups: list[str] = Field(default_factory=list)


class GroupsBody(BaseModel):
    groups: list[str]


def _api_error(code: str, message: str, status: int, trace_id: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "trace_id": trace_id,
                 "http_status": status},
    )


class _TelemetryMiddleware(BaseHTTPMiddleware):
    def __init__(self, app, tracer: Tracer, metrics: MetricsRegistry,
                 logger: JsonLogger):
        super().__init__(app)
        self.tracer = tracer
        self.metrics = metrics
        self.logger = logger

    async def dispatch(self, request: Request, call_next):
        parent = self.tracer.extract_or_root(dict(request.headers))
        started = time.monotonic()
        with self.tracer.start_span(f"http {request.url.path}", parent=parent) as ctx:
            request.state.trace = ctx
            self.logger.info("request received", method=request.method,
                             path=request.url.path)
            response = await call_next(request)
            duration_ms = (time.monotonic() - started) * 1000
            labels = {"path": request.url.path, "method": request.method}
            self.metrics.inc_counter("rag.api.requests", labels=labels)
            self.metrics.observe("rag.api.request_duration_ms", duration_ms,
                                 labels=labels)
            if response.status_code >= 500:
                self.metrics.inc_counter("rag.api.errors", labels=labels)
            response.headers["x-trace-id"] = ctx.trace_id
            return response


def create_gateway(
    auth: AuthService,
    ingestor: Ingestor,
    chain: Chain,
    models: ModelClient,
    tracer: Optional[Tracer] = None,
    metrics: Optional[MetricsRegistry] = None,
    logger: Optional[JsonLogger] = None,
) -> FastAPI:
    tracer = tracer or Tracer("gateway")
    metrics = metrics or MetricsRegistry()
    logger = logger or JsonLogger("gateway")

    app = FastAPI(title="rag-gateway", version="1")
    app.add_middleware(_TelemetryMiddleware, tracer=tracer, metrics=metrics,
                       logger=logger)
    app.state.metrics = metrics
    app.state.tracer = tracer

    def principal_of(request: Request,
                     authorization: str = Header(default="")) -> Principal:
        if not authorization.startswith("Bearer "):
            raise Unauthorized("missing bearer token")
        return auth.resolve_principal(authorization[len("Bearer "):])

    @app.exception_handler(RagError)
    async def rag_error_handler(request: Request, exc: RagError):
        trace = getattr(request.state, "trace", None)
        return _api_error(exc.code, exc.message, exc.http_status,
                          trace.trace_id if trace else "")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        trace = getattr(request.state, "trace", None)
        return _api_error("validation_error", str(exc.errors()[:1]), 422,
                          trace.trace_id if trace else "")

    @app.exception_handler(404)
    async def not_found_handler(request: Request, exc):
        trace = getattr(request.state, "trace", None)
        return _api_error("not_found", "no such route or resource", 404,
                          trace.trace_id if trace else "")

    # -- liveness / readiness ----------------------------------------------

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/readyz")
    async def readyz(request: Request):
        try:
            models.health()
        except RagError as exc:
            trace = getattr(request.state, "trace", None)
            return _api_error("dependency_unavailable",
                              f"model backend not ready: {exc.message}", 503,
                              trace.trace_id if trace else "")
        return {"status": "ready"}

    # -- auth ---------------------------------------------------------------

    @app.post("/v1/auth/login")
    async def login(body: LoginBody) -> dict:
        token = auth.authenticate(body.user_id, body.secret)
        return {"token": token.token, "user_id": token.user_id,
                "expires_at": token.expires_at.isoformat()}

    @app.post("/v1/auth/logout")
    async def logout(request: Request,
                     principal: Principal = Depends(principal_of),
                     authorization: str = Header(default="")) -> dict:
        auth.logout(authorization[len("Bearer "):])
        return {"status": "logged_out"}

    # -- query --------------------------------------------------------------

    @app.post("/v1/query")
    async def query(body: QueryBody,
                    principal: Principal = Depends(principal_of)) -> JSONResponse:
        answer = chain.answer_query(
            QueryRequest(query=body.query, conversation_id=body.conversation_id,
                         k=body.k),
            principal,
        )
        return JSONResponse(answer.to_json())

    @app.post("/v1/query/stream")
    async def query_stream(body: QueryBody,
                           principal: Principal = Depends(principal_of)):
        answer = chain.answer_query(
            QueryRequest(query=body.query, conversation_id=body.conversation_id,
                         k=body.k),
            principal,
        )

        def frames():
            words = answer.text.split(" ")
            for i in range(0, len(words), STREAM_WORDS_PER_FRAME):
                text = (" " if i else "") + " ".join(words[i:i + STREAM_WORDS_PER_FRAME])
                yield json.dumps({"type": "text", "text": text}) + "\n"
            yield json.dumps({"type": "done", "answer": answer.to_json()}) + "\n"

        return StreamingResponse(frames(), media_type="application/x-ndjson")

    # -- documents ----------------------------------------------------------

    @app.post("/v1/documents")
    async def ingest(body: IngestBody,
                     principal: Principal = Depends(principal_of)) -> dict:
        raw = base64.b64decode(body.content_base64) if body.content_base64 else None
        report = ingestor.ingest(
            IngestRequest(source_uri=body.source_uri, acl=body.acl.to_policy(),
                          declared_format=body.declared_format,
                          doc_id=body.doc_id, title=body.title),
            raw=raw,
        )
        metrics.observe("rag.loader.ingestion_duration_ms", report.duration_ms)
        return report.to_json()

    def _authorized_document(doc_id: str, principal: Principal) -> dict:
        # unauthorized and missing documents yield byte-identical errors so
        # existence is not disclosed to unauthorized readers
        try:
            payload = ingestor.get_document(doc_id)
        except NotFound:
            raise NotFound(f"document {doc_id}") from None
        acl = AccessPolicy.from_json(payload["acl"])
        if not authorize_read(principal, acl):
            raise NotFound(f"document {doc_id}")
        return payload

    @app.get("/v1/documents/{doc_id}")
    async def get_document(doc_id: str,
                           principal: Principal = Depends(principal_of)) -> dict:
        return _authorized_document(doc_id, principal)

    @app.get("/v1/documents/{doc_id}/chunks")
    async def get_chunks(doc_id: str,
                         principal: Principal = Depends(principal_of)) -> dict:
        _authorized_document(doc_id, principal)
        return {"doc_id": doc_id, "chunks": ingestor.get_chunks(doc_id)}

    # -- config / schemas ---------------------------------------------------

    @app.get("/v1/config")
    async def get_config(principal: Principal = Depends(principal_of)) -> dict:
        return chain.config.to_json()

    @app.get("/v1/schema")
    async def schemas(principal: Principal = Depends(principal_of)) -> dict:
        return {"schemas": sorted(ALL_SCHEMAS)}

    @app.get("/v1/schema/{name}")
    async def schema(name: str,
                     principal: Principal = Depends(principal_of)) -> dict:
        if name not in ALL_SCHEMAS:
            raise NotFound(name)
        return ALL_SCHEMAS[name]

    # -- user administration -------------------------------------------------

    def admin_of(request: Request,
                 authorization: str = Header(default="")) -> Principal:
        principal = principal_of(request, authorization)
        if "admin" not in principal.groups:
            raise Forbidden("admin group required")
        return principal

    @app.post("/v1/admin/users")
    async def add_user(body: UserBody,
                       principal: Principal = Depends(admin_of)) -> dict:
        auth.add_user(body.user_id, body.secret, set(body.groups))
        return {"user_id": body.user_id, "groups": sorted(body.groups)}

    @app.post("/v1/admin/users/{user_id}/disable")
    async def disable_user(user_id: str,
                           principal: Principal = Depends(admin_of)) -> dict:
        auth.disable_user(user_id)
        return {"user_id": user_id, "disabled": True}

    @app.put("/v1/admin/users/{user_id}/groups")
    async def set_groups(user_id: str, body: GroupsBody,
                         principal: Principal = Depends(admin_of)) -> dict:
        auth.set_groups(user_id, set(body.groups))
        return {"user_id": user_id, "groups": sorted(body.groups)}

    return app
