from ragstack.core.text import (
    chunk_identifier,
    content_digest,
    estimate_tokens,
    max_words_for_tokens,
    normalize_text,
)
from ragstack.core.types import (
    AccessPolicy,
    Answer,
    Chunk,
    Citation,
    Document,
    IngestReport,
    Principal,
    Verdict,
    utcnow,
)

__all__ = [
    "AccessPolicy",
    "Answer",
    "Chunk",
    "Citation",
    "Document",
    "IngestReport",
    "Principal",
    "Verdict",
    "chunk_identifier",
    "content_digest",
    "estimate_tokens",
    "max_words_for_tokens",
    "normalize_text",
    "utcnow",
]
