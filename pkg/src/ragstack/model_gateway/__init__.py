from ragstack.model_gateway.client import ModelClient
from ragstack.model_gateway.mock_model import (
    MOCK_MARKER,
    MOCK_MODEL_ID,
    NO_CONTEXT_COMPLETION,
    mock_embedding,
    mock_generate,
)
from ragstack.model_gateway.mock_server import create_mock_app
from ragstack.model_gateway.wire import (
    Completion,
    EmbeddingResponse,
    GenerationRequest,
    Usage,
)

__all__ = [
    "Completion",
    "EmbeddingResponse",
    "GenerationRequest",
    "MOCK_MARKER",
    "MOCK_MODEL_ID",
    "ModelClient",
    "NO_CONTEXT_COMPLETION",
    "Usage",
    "create_mock_app",
    "mock_embedding",
    "mock_generate",
]
