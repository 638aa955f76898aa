"""Backend-agnostic HTTP clients for generation and embedding endpoints.

Transient transport failures are retried with exponential backoff
(200 ms base, factor 2, 3 attempts total) before ModelUnavailable is
raised. Server-reported context_too_long propagates as ContextTooLong.
"""

from __future__ import annotations

import os
import time
from typing import Callable, Optional

import httpx

from ragstack.errors import ContextTooLong, EmptyInput, ModelUnavailable
from ragstack.model_gateway.wire import Completion, EmbeddingResponse, GenerationRequest

BACKOFF_BASE_S = 0.2
BACKOFF_FACTOR = 2
MAX_ATTEMPTS = 3


class ModelClient:
    def __init__(
        self,
        generation_endpoint: Optional[str] = None,
        embedding_endpoint: Optional[str] = None,
        http: Optional[httpx.Client] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.generation_endpoint = (
            generation_endpoint or os.environ.get("GENERATION_ENDPOINT", "")
        ).rstrip("/")
        self.embedding_endpoint = (
            embedding_endpoint or os.environ.get("EMBEDDING_ENDPOINT", "")
        ).rstrip("/")
        timeout_ms = int(os.environ.get("MODEL_TIMEOUT_MS", "10000"))
        self._http = http or httpx.Client(timeout=timeout_ms / 1000)
        self._sleep = sleep

    def _post_with_retry(self, url: str, payload: dict) -> httpx.Response:
        delay = BACKOFF_BASE_S
        last_exc: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            try:
                return self._http.post(url, json=payload)
            except httpx.TransportError as exc:
                last_exc = exc
                if attempt < MAX_ATTEMPTS - 1:
                    self._sleep(delay)
                    delay *= BACKOFF_FACTOR
        raise ModelUnavailable(f"{url}: {last_exc}")

    def generate(self, req: GenerationRequest) -> Completion:
        if not self.generation_endpoint:
            raise ModelUnavailable("GENERATION_ENDPOINT not configured")
        resp = self._post_with_retry(f"{self.generation_endpoint}/v1/chat", req.to_json())
        if resp.status_code == 422 and resp.json().get("code") == "context_too_long":
            raise ContextTooLong(resp.json().get("message", ""))
        if resp.status_code != 200:
            raise ModelUnavailable(f"/v1/chat -> {resp.status_code}")
        return Completion.from_json(resp.json())

    def embed(self, texts: list[str]) -> EmbeddingResponse:
        if not texts or any(not t for t in texts):
            raise EmptyInput("texts must be a nonempty list of nonempty strings")
        if not self.embedding_endpoint:
            raise ModelUnavailable("EMBEDDING_ENDPOINT not configured")
        resp = self._post_with_retry(f"{self.embedding_endpoint}/v1/embed",
                                     {"texts": texts})
        if resp.status_code != 200:
            raise ModelUnavailable(f"/v1/embed -> {resp.status_code}")
        out = EmbeddingResponse.from_json(resp.json())
        if len(out.vectors) != len(texts):
            raise ModelUnavailable("embedding count mismatch")
        return out

    def health(self) -> dict:
        url = self.generation_endpoint or self.embedding_endpoint
        try:
            resp = self._http.get(f"{url}/v1/health")
        except httpx.TransportError as exc:
            raise ModelUnavailable(str(exc)) from exc
        if resp.status_code != 200:
            raise ModelUnavailable(f"/v1/health -> {resp.status_code}")
        return resp.json()
