from ragstack.loader.chunking import ChunkingConfig, chunk_text, strip_overlap_and_join
from ragstack.loader.ingest import (
    IngestRequest,
    Ingestor,
    derive_doc_id,
    detect_format,
    read_source,
)

__all__ = [
    "ChunkingConfig",
    "IngestRequest",
    "Ingestor",
    "chunk_text",
    "derive_doc_id",
    "detect_format",
    "read_source",
    "strip_overlap_and_join",
]
