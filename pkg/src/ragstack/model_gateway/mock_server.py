"""Mock inference server: stateless, deterministic, protocol-complete.

Serves POST /v1/chat, POST /v1/embed, GET /v1/health with the documented
schemas, plus POST /v1/chat/stream emitting the completion in fixed-size
text frames for the UI streaming path.
Run standalone via `python -m ragstack.model_gateway.mock_server`.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from ragstack.core import estimate_tokens
from ragstack.model_gateway.mock_model import (
    MOCK_MODEL_ID,
    mock_embedding,
    mock_generate,
)
from ragstack.model_gateway.wire import Completion, EmbeddingResponse, GenerationRequest, Usage

DEFAULT_DIMENSION = 64
MAX_CONTEXT_TOKENS = 8192
MAX_COMPLETION_TOKENS = 1024


def create_mock_app(dimension: int = DEFAULT_DIMENSION) -> FastAPI:
    app = FastAPI(title="mock-inference")

    def _complete(req: GenerationRequest) -> Completion | JSONResponse:
        prompt = req.system_prompt + "\n" + req.user_prompt
        prompt_tokens = estimate_tokens(prompt)
        if prompt_tokens > MAX_CONTEXT_TOKENS:
            return JSONResponse(status_code=422,
                                content={"code": "context_too_long",
                                         "message": f"{prompt_tokens} tokens"})
        max_tokens = min(req.max_tokens, MAX_COMPLETION_TOKENS)
        text, finish_reason = mock_generate(req.user_prompt, max_tokens,
                                            list(req.stop or []))
        return Completion(
            text=text,
            finish_reason=finish_reason,
            usage=Usage(prompt_tokens, len(text.split())),
            model_id=MOCK_MODEL_ID,
        )

    @app.post("/v1/chat")
    async def chat(request: Request) -> Response:
        req = GenerationRequest.from_json(await request.json())
        result = _complete(req)
        if isinstance(result, JSONResponse):
            return result
        return JSONResponse(result.to_json())

    @app.post("/v1/chat/stream")
    async def chat_stream(request: Request) -> Response:
        req = GenerationRequest.from_json(await request.json())
        result = _complete(req)
        if isinstance(result, JSONResponse):
            return result

        def frames():
            words = result.text.split(" ")
            for i in range(0, len(words), 4):
                yield json.dumps({"type": "text",
                                  "text": (" " if i else "") + " ".join(words[i:i + 4])}) + "\n"
            yield json.dumps({"type": "done", "completion": result.to_json()}) + "\n"

        return StreamingResponse(frames(), media_type="application/x-ndjson")

    @app.post("/v1/embed")
    async def embed(request: Request) -> Response:
        body = await request.json()
        texts = body.get("texts", [])
        if not texts or any(not t for t in texts):
            return JSONResponse(status_code=422,
                                content={"code": "empty_input",
                                         "message": "texts must be nonempty strings"})
        d = int(body.get("dimension", dimension))
        resp = EmbeddingResponse(
            vectors=tuple(tuple(mock_embedding(t, d)) for t in texts),
            dimension=d,
            model_id=MOCK_MODEL_ID,
        )
        return JSONResponse(resp.to_json())

    @app.get("/v1/health")
    async def health() -> dict:
        return {
            "model_id": MOCK_MODEL_ID,
            "dimension": dimension,
            "max_context_tokens": MAX_CONTEXT_TOKENS,
        }

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="deterministic mock inference server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8081)
    parser.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    args = parser.parse_args()
    uvicorn.run(create_mock_app(args.dimension), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
